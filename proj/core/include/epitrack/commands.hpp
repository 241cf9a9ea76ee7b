/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epitrack/grid.hpp"

namespace epitrack {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntimeError = 1,
  kExitConfigError = 2,
  kExitMetricsMismatch = 3,
};

struct CommandOptions {
  std::optional<std::uint64_t> seed;                // overrides [run] seed
  std::optional<std::filesystem::path> output_dir;  // overrides [run] output_dir
  bool pgm = false;                                 // or'ed with [run] pgm
};

/// Forward-only run: infected_<step>.asc every snapshot_interval steps plus
/// manifest.ini.
int cmd_simulate(const std::filesystem::path& config, const CommandOptions& options, std::ostream& out,
                 std::ostream& err);

/// Tracking experiment: per-cycle rasters, perturbed observations,
/// metrics.csv and manifest.ini.
int cmd_twin(const std::filesystem::path& config, const CommandOptions& options, std::ostream& out,
             std::ostream& err);

/// Recomputes the metrics of a twin run directory from its rasters and
/// compares them with metrics.csv (tolerance 1e-9).
int cmd_metrics(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

inline constexpr const char* kManifestName = "manifest.ini";
inline constexpr const char* kMetricsName = "metrics.csv";
inline constexpr double kMetricsTolerance = 1e-9;

/// `<field>_<step:05d>.<ext>`
std::string snapshot_name(const std::string& field, std::int64_t step, const std::string& ext = "asc");

/// P2 greyscale image, 8-bit, scaled so the field maximum maps to 255.
std::string format_pgm(const ScalarField& field);

struct ManifestEntry {
  std::string path;  // relative to the run directory
  std::string role;
};

struct Manifest {
  std::string version;
  std::string command;
  std::uint64_t master_seed = 0;
  std::string config;  // resolved config echo (sectioned text)
  std::vector<ManifestEntry> files;
};

std::string format_manifest(const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);

const char* version_string();

}  // namespace epitrack
