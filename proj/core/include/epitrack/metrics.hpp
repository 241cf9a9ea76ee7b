/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "epitrack/grid.hpp"

namespace epitrack {

/// sqrt(sum (a - b)^2 / p). Throws DimensionError unless the lattices match.
double rmse(const ScalarField& a, const ScalarField& b);

/// Total count represented by a density field: sum of values times cell area.
double total_count(const ScalarField& field);

inline constexpr const char* kMetricsHeader =
    "cycle,step,rmse_forecast,rmse_analysis,censored_count,total_I_truth,total_I_analysis_mean";

struct MetricsRow {
  std::size_t cycle = 0;
  std::int64_t step = 0;
  double rmse_forecast = 0.0;
  double rmse_analysis = 0.0;
  std::size_t censored_count = 0;
  double total_i_truth = 0.0;
  double total_i_analysis_mean = 0.0;

  bool operator==(const MetricsRow&) const = default;
};

/// CSV text with the fixed header, '\n' line endings and round-trip decimals.
std::string format_metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text, const std::string& source = "metrics.csv");

}  // namespace epitrack
