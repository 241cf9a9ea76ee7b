/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "epitrack/grid.hpp"
#include "epitrack/kernel.hpp"
#include "epitrack/random.hpp"

namespace epitrack {

/// Susceptible, infected and removed densities at step t, on one grid.
struct EpidemicState {
  ScalarField s;
  ScalarField i;
  ScalarField r;
  std::int64_t t = 0;

  /// S = population, I = R = 0.
  static EpidemicState disease_free(const ScalarField& population);

  const GridSpec& spec() const { return s.spec(); }

  /// Throws ConfigError on mismatched grids or negative/non-finite values.
  void validate() const;

  bool operator==(const EpidemicState&) const = default;
};

struct SirParams {
  double beta = 0.0;   // infection rate per unit effective infected density
  double gamma = 0.0;  // removal rate
  double alpha = 1.0;  // kernel decay per length unit
  double dt = 1.0;
  std::optional<std::size_t> kernel_radius_cells;  // nullopt: default_kernel_radius

  void validate() const;
  std::size_t resolved_radius(double cellsize) const;
};

Kernel make_kernel(const SirParams& params, double cellsize);

/// Moves `amount` density from S to I at (row, col) when the state reaches
/// `step`. The transfer is clamped to the available S.
struct SeedEvent {
  std::int64_t step = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  double amount = 0.0;

  bool operator==(const SeedEvent&) const = default;
};

enum class StepMode { kStochastic, kDeterministic };

/// Counts transfers that had to be clamped to the available compartment.
struct StepDiagnostics {
  std::size_t clamped_infections = 0;
  std::size_t clamped_removals = 0;
  std::size_t clamped_seeds = 0;

  std::size_t total() const { return clamped_infections + clamped_removals + clamped_seeds; }
};

/// One stochastic step. Cell k draws its two Poisson counts from
/// rng.substream(k, state.t, kDynamics), so results do not depend on the
/// order in which cells are visited.
EpidemicState step_stochastic(const EpidemicState& state, const SirParams& params, const Kernel& kernel,
                              const RngStream& rng, StepDiagnostics* diag = nullptr);

/// One forward-Euler step of the deterministic system.
EpidemicState step_deterministic(const EpidemicState& state, const SirParams& params, const Kernel& kernel,
                                 StepDiagnostics* diag = nullptr);

/// Applies the seed events scheduled for state.t.
void apply_seed_events(EpidemicState& state, std::span<const SeedEvent> events,
                       StepDiagnostics* diag = nullptr);

/// Advances `steps` steps. Element k of the result is the state at
/// initial.t + k after the seed events scheduled for that time; events must
/// be sorted by step and fall inside [initial.t, initial.t + steps].
std::vector<EpidemicState> run_forward(const EpidemicState& initial, const SirParams& params,
                                       const Kernel& kernel, std::size_t steps, StepMode mode,
                                       const RngStream& rng, std::span<const SeedEvent> events = {},
                                       StepDiagnostics* diag = nullptr);

/// Checks event ordering and bounds against `spec`.
void validate_seed_events(std::span<const SeedEvent> events, const GridSpec& spec);

}  // namespace epitrack
