/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace epitrack {

/// Geometry of a regular raster with square cells. Row 0 is the northmost
/// row; (origin_x, origin_y) is the lower-left corner of the grid.
struct GridSpec {
  std::size_t ncols = 1;
  std::size_t nrows = 1;
  double cellsize = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double nodata_value = -9999.0;

  /// Throws ConfigError unless ncols, nrows >= 1 and cellsize > 0 (finite).
  void validate() const;

  std::size_t size() const { return ncols * nrows; }
  double cell_area() const { return cellsize * cellsize; }
  std::size_t index(std::size_t row, std::size_t col) const { return row * ncols + col; }
  std::size_t row_of(std::size_t flat) const { return flat / ncols; }
  std::size_t col_of(std::size_t flat) const { return flat % ncols; }

  // Cell-centre coordinates in map units.
  double center_x(std::size_t col) const;
  double center_y(std::size_t row) const;

  /// Same lattice (shape and cell size); origin and sentinel are metadata.
  bool same_lattice(const GridSpec& other) const {
    return ncols == other.ncols && nrows == other.nrows && cellsize == other.cellsize;
  }

  bool operator==(const GridSpec&) const = default;
};

/// One real value per grid cell (a density per unit area), row-major.
class ScalarField {
 public:
  ScalarField() = default;

  /// Zero-filled field on `spec`.
  explicit ScalarField(const GridSpec& spec);

  /// Takes ownership of `values`; throws DimensionError on a length mismatch
  /// and ConfigError if any value is NaN/Inf.
  ScalarField(const GridSpec& spec, std::vector<double> values);

  static ScalarField filled(const GridSpec& spec, double value);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t row, std::size_t col) const { return values_[spec_.index(row, col)]; }
  double& operator()(std::size_t row, std::size_t col) { return values_[spec_.index(row, col)]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double sum() const;

  bool operator==(const ScalarField&) const = default;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// A field laid out as the filter state vector (row-major, row 0 first).
struct StateVector {
  GridSpec spec;
  std::vector<double> data;

  bool operator==(const StateVector&) const = default;
};

StateVector flatten(const ScalarField& field);

/// Throws DimensionError unless v.data.size() == v.spec.size().
ScalarField unflatten(const StateVector& v);

struct AsciiGrid {
  ScalarField field;
  std::size_t nodata_count = 0;
};

/// Reads an ESRI ASCII grid. NODATA cells become 0.0 and are counted.
/// Malformed headers, rows with the wrong token count and non-numeric
/// tokens raise ParseError naming the offending line.
AsciiGrid read_ascii_grid(const std::filesystem::path& path);

/// Writes `field` with shortest round-trip decimal formatting, so reading the
/// file back reproduces every value bitwise.
void write_ascii_grid(const ScalarField& field, const std::filesystem::path& path);

}  // namespace epitrack
