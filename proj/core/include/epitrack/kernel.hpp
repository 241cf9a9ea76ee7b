/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <vector>

#include "epitrack/grid.hpp"

namespace epitrack {

/// Truncated exponential contact stencil, normalized to unit sum after
/// truncation. weight(i, j) is the weight at row offset i, column offset j,
/// both in [-radius, radius].
class Kernel {
 public:
  Kernel() = default;
  Kernel(double alpha, std::size_t radius_cells, double cellsize, std::vector<double> weights);

  double alpha() const { return alpha_; }
  std::size_t radius() const { return radius_; }
  double cellsize() const { return cellsize_; }
  std::size_t width() const { return 2 * radius_ + 1; }

  double weight(long i, long j) const {
    const long r = static_cast<long>(radius_);
    return weights_[static_cast<std::size_t>((i + r) * static_cast<long>(width()) + (j + r))];
  }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double alpha_ = 0.0;
  std::size_t radius_ = 0;
  double cellsize_ = 1.0;
  std::vector<double> weights_{1.0};
};

/// Weight at offset (i, j) proportional to exp(-alpha * cellsize * sqrt(i^2 + j^2)).
/// alpha == 0 gives the uniform stencil.
Kernel build_kernel(double alpha, std::size_t radius_cells, double cellsize);

/// Smallest radius whose discarded (unnormalized) tail mass is below
/// `tail_tolerance` times the retained mass. Requires alpha > 0.
std::size_t default_kernel_radius(double alpha, double cellsize, double tail_tolerance = 1e-6);

/// Effective infection density J = I * K with zero padding outside the grid.
ScalarField convolve(const ScalarField& infected, const Kernel& kernel);

}  // namespace epitrack
