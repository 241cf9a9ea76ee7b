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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "epitrack/assimilation.hpp"
#include "epitrack/grid.hpp"
#include "epitrack/sir.hpp"

namespace epitrack {

enum class FilterKind { kKf, kEnkf, kEnosi };

std::string to_string(FilterKind kind);
FilterKind parse_filter(const std::string& name);

/// Observation operator before the grid size is known.
struct ObsSpec {
  bool identity = true;
  std::vector<std::size_t> indices;

  ObsOperator resolve(std::size_t p) const;
};

/// Stationary covariance knobs. An unset correlation length is two cells.
/// An unset cutoff means dense storage when the grid fits under dense_cap and
/// four correlation lengths otherwise; hard truncation much closer than that
/// leaves the matrix indefinite.
struct CovarianceSpec {
  double sigma2 = 25.0;
  std::optional<double> corr_length;
  std::optional<double> cutoff;  // +inf requests the dense representation
  std::size_t dense_cap = kDefaultDenseCap;

  double resolved_corr_length(double cellsize) const { return corr_length.value_or(2.0 * cellsize); }
  double resolved_cutoff(const GridSpec& grid) const {
    if (cutoff) return *cutoff;
    if (grid.size() <= dense_cap) return std::numeric_limits<double>::infinity();
    return 4.0 * resolved_corr_length(grid.cellsize);
  }
};

/// Everything a tracking experiment needs, with the population resolved.
struct ScenarioConfig {
  ScalarField population;
  SirParams sir;
  std::vector<SeedEvent> seed_events;
  std::vector<std::int64_t> obs_schedule{10, 20, 30, 40, 50};
  std::size_t ensemble_size = 25;
  FilterKind filter = FilterKind::kEnosi;
  ObsSpec obs;
  CovarianceSpec cov;
  std::uint64_t master_seed = 0;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Stream ids derived from the master seed. Members use stream j; the
/// reserved ids sit in the top half of the 64-bit range.
struct TwinStreams {
  static RngStream truth(std::uint64_t seed) { return {seed, RngStream::kTruthStream}; }
  static RngStream observations(std::uint64_t seed) { return {seed, RngStream::kObservationStream}; }
  static RngStream perturbations(std::uint64_t seed, std::int64_t step) {
    return {seed, kPerturbationBase + static_cast<std::uint64_t>(step)};
  }
  static RngStream member(std::uint64_t seed, std::size_t j) { return {seed, static_cast<std::uint64_t>(j)}; }

  static constexpr std::uint64_t kPerturbationBase = 0x8000000100000000ULL;
};

/// One forecast/analysis cycle.
struct CycleRecord {
  std::size_t cycle = 0;  // 1-based
  std::int64_t step = 0;
  ScalarField truth;       // I of the truth run
  ScalarField observation; // delivered y; unobserved cells hold the nodata sentinel
  Matrix perturbed_obs;    // m x N
  Vector r_diag;
  ScalarField forecast_mean;
  ScalarField forecast_sd;
  ScalarField analysis_mean;
  ScalarField analysis_sd;
  double rmse_forecast = 0.0;
  double rmse_analysis = 0.0;
  std::size_t censored_count = 0;
};

struct TwinResult {
  std::vector<EpidemicState> truth;  // steps 0 .. max(schedule)
  std::vector<CycleRecord> cycles;
  StepDiagnostics truth_diagnostics;
  StepDiagnostics member_diagnostics;
  std::size_t gain_factorizations = 0;
};

struct TwinOptions {
  /// Order in which members are propagated; empty means 0..N-1.
  std::vector<std::size_t> propagation_order;
};

/// Stochastic truth run from the disease-free population over
/// max(obs_schedule) steps, with every configured seed event.
std::vector<EpidemicState> generate_truth(const ScenarioConfig& cfg, StepDiagnostics* diag = nullptr);

/// y(k) ~ Poisson(truth at observed cell k), drawn from
/// rng.substream(k, step, kObservation); R = diag(max(y, 1)).
ObsBatch generate_observations(const ScalarField& truth_i, const ObsOperator& h, const RngStream& rng,
                               std::int64_t step);

/// Advances `state` to `to_step` with stochastic steps on `rng`.
EpidemicState propagate(EpidemicState state, std::int64_t to_step, const SirParams& params, const Kernel& kernel,
                        const RngStream& rng, StepDiagnostics* diag = nullptr);

/// Forecast/analysis cycles at every scheduled step. Errors from inner
/// operations are rethrown with the cycle and step prepended.
TwinResult run_twin(const ScenarioConfig& cfg, const TwinOptions& options = {});

}  // namespace epitrack
