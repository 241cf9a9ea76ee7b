/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epitrack {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (raster, CSV, manifest). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Invalid or inconsistent configuration / arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An argument outside the operation's domain (negative intensity, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Shapes or grid specs that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A symmetric matrix that was expected to be positive definite is not.
/// minor_index() is the 0-based index of the first non-positive pivot, or
/// npos when the factorization backend cannot tell.
class FactorizationError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit FactorizationError(std::size_t minor_index)
      : Error(minor_index == npos
                  ? std::string("matrix is not positive definite")
                  : "matrix is not positive definite: leading minor " +
                        std::to_string(minor_index + 1) + " is not positive"),
        minor_(minor_index) {}

  std::size_t minor_index() const { return minor_; }

 private:
  std::size_t minor_;
};

/// Filesystem failure while reading or writing outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace epitrack
