/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "epitrack/error.hpp"
#include "epitrack/format.hpp"

namespace epitrack {

double rmse(const ScalarField& a, const ScalarField& b) {
  if (!a.spec().same_lattice(b.spec())) throw DimensionError("rmse of fields on different grids");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double total_count(const ScalarField& field) { return field.sum() * field.spec().cell_area(); }

std::string format_metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const MetricsRow& r : rows) {
    out += std::to_string(r.cycle) + ',' + std::to_string(r.step) + ',' + format_double(r.rmse_forecast) + ',' +
           format_double(r.rmse_analysis) + ',' + std::to_string(r.censored_count) + ',' +
           format_double(r.total_i_truth) + ',' + format_double(r.total_i_analysis_mean) + '\n';
  }
  return out;
}

namespace {

template <class Int>
Int parse_int(const std::string& tok, const std::string& source, std::size_t line) {
  Int value{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError(source, line, "expected an integer, got '" + tok + "'");
  }
  return value;
}

double parse_real(const std::string& tok, const std::string& source, std::size_t line) {
  const auto v = parse_double(tok);
  if (!v) throw ParseError(source, line, "expected a number, got '" + tok + "'");
  return *v;
}

}  // namespace

std::vector<MetricsRow> parse_metrics_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ParseError(source, 1, "missing or unexpected metrics header");
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) throw ParseError(source, lineno, "expected 7 columns");
    MetricsRow r;
    r.cycle = parse_int<std::size_t>(cells[0], source, lineno);
    r.step = parse_int<std::int64_t>(cells[1], source, lineno);
    r.rmse_forecast = parse_real(cells[2], source, lineno);
    r.rmse_analysis = parse_real(cells[3], source, lineno);
    r.censored_count = parse_int<std::size_t>(cells[4], source, lineno);
    r.total_i_truth = parse_real(cells[5], source, lineno);
    r.total_i_analysis_mean = parse_real(cells[6], source, lineno);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace epitrack
