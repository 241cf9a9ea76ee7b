/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/grid.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>

#include "epitrack/error.hpp"
#include "epitrack/format.hpp"

namespace epitrack {

void GridSpec::validate() const {
  if (ncols < 1 || nrows < 1) {
    throw ConfigError("grid must have at least one row and one column");
  }
  if (!(cellsize > 0.0) || !std::isfinite(cellsize)) {
    throw ConfigError("cellsize must be a positive finite number");
  }
}

double GridSpec::center_x(std::size_t col) const {
  return origin_x + (static_cast<double>(col) + 0.5) * cellsize;
}

double GridSpec::center_y(std::size_t row) const {
  return origin_y + (static_cast<double>(nrows - row) - 0.5) * cellsize;
}

ScalarField::ScalarField(const GridSpec& spec) : spec_(spec), values_(spec.size(), 0.0) {
  spec_.validate();
}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.size()) {
    throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid has " +
                         std::to_string(spec_.size()) + " cells");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ConfigError("field values must be finite");
  }
}

ScalarField ScalarField::filled(const GridSpec& spec, double value) {
  return ScalarField(spec, std::vector<double>(spec.size(), value));
}

double ScalarField::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

StateVector flatten(const ScalarField& field) {
  return StateVector{field.spec(), std::vector<double>(field.values().begin(), field.values().end())};
}

ScalarField unflatten(const StateVector& v) {
  if (v.data.size() != v.spec.size()) {
    throw DimensionError("state vector of length " + std::to_string(v.data.size()) +
                         " does not match a " + std::to_string(v.spec.nrows) + "x" +
                         std::to_string(v.spec.ncols) + " grid");
  }
  return ScalarField(v.spec, v.data);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

AsciiGrid read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open raster '" + path.string() + "'");
  const std::string name = path.string();

  constexpr std::array<std::string_view, 6> kKeys = {"ncols",     "nrows",    "xllcorner",
                                                     "yllcorner", "cellsize", "nodata_value"};
  std::array<double, 6> header{};
  std::array<bool, 6> seen{};

  std::string line;
  std::size_t lineno = 0;
  for (std::size_t h = 0; h < kKeys.size(); ++h) {
    if (!std::getline(in, line)) {
      throw ParseError(name, lineno + 1, "unexpected end of file in header");
    }
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.size() != 2) throw ParseError(name, lineno, "header line must be '<key> <value>'");
    const std::string key = lower(tokens[0]);
    const auto it = std::find(kKeys.begin(), kKeys.end(), key);
    if (it == kKeys.end()) {
      throw ParseError(name, lineno, "unknown header key '" + std::string(tokens[0]) + "'");
    }
    const auto k = static_cast<std::size_t>(it - kKeys.begin());
    if (seen[k]) throw ParseError(name, lineno, "duplicate header key '" + key + "'");
    const auto value = parse_double(tokens[1]);
    if (!value) {
      throw ParseError(name, lineno, "non-numeric header value '" + std::string(tokens[1]) + "'");
    }
    header[k] = *value;
    seen[k] = true;
  }

  GridSpec spec;
  for (std::size_t k : {0U, 1U}) {
    if (header[k] < 1 || header[k] != std::floor(header[k])) {
      throw ParseError(name, k + 1, std::string(kKeys[k]) + " must be a positive integer");
    }
  }
  spec.ncols = static_cast<std::size_t>(header[0]);
  spec.nrows = static_cast<std::size_t>(header[1]);
  spec.origin_x = header[2];
  spec.origin_y = header[3];
  spec.cellsize = header[4];
  spec.nodata_value = header[5];
  if (!(spec.cellsize > 0.0)) throw ParseError(name, 5, "cellsize must be positive");

  std::vector<double> values;
  values.reserve(spec.size());
  std::size_t nodata = 0;
  for (std::size_t row = 0; row < spec.nrows; ++row) {
    if (!std::getline(in, line)) {
      throw ParseError(name, lineno + 1,
                       "expected " + std::to_string(spec.nrows) + " data rows, found " + std::to_string(row));
    }
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.size() != spec.ncols) {
      throw ParseError(name, lineno,
                       "row " + std::to_string(row) + " has " + std::to_string(tokens.size()) +
                           " values, expected " + std::to_string(spec.ncols));
    }
    for (auto tok : tokens) {
      const auto v = parse_double(tok);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(name, lineno, "non-numeric value '" + std::string(tok) + "'");
      }
      if (*v == spec.nodata_value) {
        values.push_back(0.0);
        ++nodata;
      } else {
        values.push_back(*v);
      }
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_ws(line).empty()) throw ParseError(name, lineno, "unexpected data after last row");
  }
  return AsciiGrid{ScalarField(spec, std::move(values)), nodata};
}

void write_ascii_grid(const ScalarField& field, const std::filesystem::path& path) {
  const GridSpec& spec = field.spec();
  std::ostringstream out;
  out << "ncols " << spec.ncols << '\n'
      << "nrows " << spec.nrows << '\n'
      << "xllcorner " << format_double(spec.origin_x) << '\n'
      << "yllcorner " << format_double(spec.origin_y) << '\n'
      << "cellsize " << format_double(spec.cellsize) << '\n'
      << "NODATA_value " << format_double(spec.nodata_value) << '\n';
  for (std::size_t r = 0; r < spec.nrows; ++r) {
    for (std::size_t c = 0; c < spec.ncols; ++c) {
      if (c > 0) out << ' ';
      out << format_double(field(r, c));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace epitrack
