/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/kernel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "epitrack/error.hpp"

namespace epitrack {

namespace {
constexpr std::size_t kMaxRadius = 4096;
}

Kernel::Kernel(double alpha, std::size_t radius_cells, double cellsize, std::vector<double> weights)
    : alpha_(alpha), radius_(radius_cells), cellsize_(cellsize), weights_(std::move(weights)) {
  if (weights_.size() != width() * width()) {
    throw DimensionError("kernel stencil must have (2r+1)^2 weights");
  }
}

Kernel build_kernel(double alpha, std::size_t radius_cells, double cellsize) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("kernel alpha must be >= 0");
  if (!(cellsize > 0.0)) throw ConfigError("kernel cellsize must be > 0");
  if (radius_cells > kMaxRadius) throw ConfigError("kernel radius too large");

  const long r = static_cast<long>(radius_cells);
  const std::size_t w = 2 * radius_cells + 1;
  std::vector<double> weights(w * w);
  for (long i = -r; i <= r; ++i) {
    for (long j = -r; j <= r; ++j) {
      const double d = std::sqrt(static_cast<double>(i * i + j * j));
      weights[static_cast<std::size_t>((i + r) * static_cast<long>(w) + (j + r))] =
          std::exp(-alpha * cellsize * d);
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& x : weights) x /= total;
  return Kernel(alpha, radius_cells, cellsize, std::move(weights));
}

std::size_t default_kernel_radius(double alpha, double cellsize, double tail_tolerance) {
  if (!(alpha > 0.0)) throw ConfigError("automatic kernel radius needs alpha > 0");
  const double a = alpha * cellsize;
  // Euclidean distance >= Chebyshev distance k, and ring k holds 8k cells, so
  // sum_{k>R} 8k exp(-a k) bounds the discarded mass.
  auto tail_bound = [a](std::size_t radius) {
    double tail = 0.0;
    for (std::size_t k = radius + 1;; ++k) {
      const double term = 8.0 * static_cast<double>(k) * std::exp(-a * static_cast<double>(k));
      tail += term;
      if (term < 1e-300 || term < tail * 1e-17) break;
    }
    return tail;
  };
  double retained = 1.0;
  for (std::size_t radius = 0; radius <= kMaxRadius; ++radius) {
    if (radius > 0) {
      const long r = static_cast<long>(radius);
      for (long i = -r; i <= r; ++i) {
        for (long j = -r; j <= r; ++j) {
          if (std::max(std::labs(i), std::labs(j)) != r) continue;
          retained += std::exp(-a * std::sqrt(static_cast<double>(i * i + j * j)));
        }
      }
    }
    if (tail_bound(radius) < tail_tolerance * retained) return radius;
  }
  throw ConfigError("kernel decay alpha=" + std::to_string(alpha) +
                    " is too slow for an automatic radius; set kernel_radius_cells");
}

ScalarField convolve(const ScalarField& infected, const Kernel& kernel) {
  const GridSpec& spec = infected.spec();
  ScalarField out(spec);
  const long nrows = static_cast<long>(spec.nrows);
  const long ncols = static_cast<long>(spec.ncols);
  const long r = static_cast<long>(kernel.radius());

  // Scatter from nonzero sources in row-major order; the summation order per
  // output cell is fixed, so results do not depend on scheduling.
  for (long sr = 0; sr < nrows; ++sr) {
    for (long sc = 0; sc < ncols; ++sc) {
      const double source = infected(static_cast<std::size_t>(sr), static_cast<std::size_t>(sc));
      if (source == 0.0) continue;
      const long i_lo = std::max(-r, -sr);
      const long i_hi = std::min(r, nrows - 1 - sr);
      const long j_lo = std::max(-r, -sc);
      const long j_hi = std::min(r, ncols - 1 - sc);
      for (long i = i_lo; i <= i_hi; ++i) {
        for (long j = j_lo; j <= j_hi; ++j) {
          out(static_cast<std::size_t>(sr + i), static_cast<std::size_t>(sc + j)) +=
              source * kernel.weight(i, j);
        }
      }
    }
  }
  return out;
}

}  // namespace epitrack
