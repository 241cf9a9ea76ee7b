/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace epitrack {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a complete decimal token (optional leading '+'). Returns nullopt if
/// any character is left over.
std::optional<double> parse_double(std::string_view token);

/// Writes `contents` byte-for-byte (no newline translation). Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace epitrack
