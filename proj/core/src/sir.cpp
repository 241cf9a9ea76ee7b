/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/sir.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epitrack/error.hpp"

namespace epitrack {

EpidemicState EpidemicState::disease_free(const ScalarField& population) {
  return EpidemicState{population, ScalarField(population.spec()), ScalarField(population.spec()), 0};
}

void EpidemicState::validate() const {
  if (!s.spec().same_lattice(i.spec()) || !s.spec().same_lattice(r.spec())) {
    throw ConfigError("S, I and R must share one grid");
  }
  for (const ScalarField* f : {&s, &i, &r}) {
    for (double v : f->values()) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("compartment densities must be finite and >= 0");
    }
  }
}

void SirParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be finite and >= 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be finite and > 0");
  if (gamma * dt > 1.0) throw ConfigError("gamma * dt must not exceed 1");
}

std::size_t SirParams::resolved_radius(double cellsize) const {
  return kernel_radius_cells ? *kernel_radius_cells : default_kernel_radius(alpha, cellsize);
}

Kernel make_kernel(const SirParams& params, double cellsize) {
  return build_kernel(params.alpha, params.resolved_radius(cellsize), cellsize);
}

namespace {

void check_step_inputs(const EpidemicState& state, const SirParams& params, const Kernel& kernel) {
  params.validate();
  if (kernel.cellsize() != state.spec().cellsize) {
    throw ConfigError("kernel was built for a different cellsize");
  }
  if (kernel.alpha() != params.alpha) throw ConfigError("kernel alpha differs from SIR alpha");
}

// Transfers computed once and applied to all three compartments keep
// S + I + R per cell fixed.
void apply_transfers(EpidemicState& next, std::size_t k, double infections, double removals,
                     StepDiagnostics* diag) {
  const double s = next.s[k];
  const double i = next.i[k];
  if (infections > s) {
    infections = s;
    if (diag) ++diag->clamped_infections;
  }
  if (removals > i) {
    removals = i;
    if (diag) ++diag->clamped_removals;
  }
  next.s[k] = s - infections;
  next.i[k] = (i - removals) + infections;
  next.r[k] = next.r[k] + removals;
}

}  // namespace

EpidemicState step_stochastic(const EpidemicState& state, const SirParams& params, const Kernel& kernel,
                              const RngStream& rng, StepDiagnostics* diag) {
  check_step_inputs(state, params, kernel);
  const ScalarField j = convolve(state.i, kernel);
  const double area = state.spec().cell_area();
  EpidemicState next = state;
  for (std::size_t k = 0; k < state.s.size(); ++k) {
    const double lam_inf = params.beta * state.s[k] * j[k] * area * params.dt;
    const double lam_rem = params.gamma * state.i[k] * area * params.dt;
    if (lam_inf == 0.0 && lam_rem == 0.0) continue;
    CounterEngine eng = rng.substream(k, static_cast<std::uint64_t>(state.t), StreamTag::kDynamics);
    const auto n_inf = poisson_sample(lam_inf, eng);
    const auto n_rem = poisson_sample(lam_rem, eng);
    apply_transfers(next, k, static_cast<double>(n_inf) / area, static_cast<double>(n_rem) / area, diag);
  }
  next.t = state.t + 1;
  return next;
}

EpidemicState step_deterministic(const EpidemicState& state, const SirParams& params, const Kernel& kernel,
                                 StepDiagnostics* diag) {
  check_step_inputs(state, params, kernel);
  const ScalarField j = convolve(state.i, kernel);
  EpidemicState next = state;
  for (std::size_t k = 0; k < state.s.size(); ++k) {
    const double inf = params.beta * state.s[k] * j[k] * params.dt;
    const double rem = params.gamma * state.i[k] * params.dt;
    if (inf == 0.0 && rem == 0.0) continue;
    apply_transfers(next, k, inf, rem, diag);
  }
  next.t = state.t + 1;
  return next;
}

void validate_seed_events(std::span<const SeedEvent> events, const GridSpec& spec) {
  for (std::size_t e = 0; e < events.size(); ++e) {
    const SeedEvent& ev = events[e];
    if (ev.row >= spec.nrows || ev.col >= spec.ncols) {
      throw ConfigError("seed event " + std::to_string(e) + " at (" + std::to_string(ev.row) + ", " +
                        std::to_string(ev.col) + ") lies outside the grid");
    }
    if (!(ev.amount > 0.0) || !std::isfinite(ev.amount)) {
      throw ConfigError("seed event " + std::to_string(e) + " must have a positive amount");
    }
    if (ev.step < 0) throw ConfigError("seed event " + std::to_string(e) + " has a negative step");
    if (e > 0 && events[e - 1].step > ev.step) throw ConfigError("seed events must be sorted by step");
  }
}

void apply_seed_events(EpidemicState& state, std::span<const SeedEvent> events, StepDiagnostics* diag) {
  for (const SeedEvent& ev : events) {
    if (ev.step != state.t) continue;
    const std::size_t k = state.spec().index(ev.row, ev.col);
    double amount = ev.amount;
    if (amount > state.s[k]) {
      amount = state.s[k];
      if (diag) ++diag->clamped_seeds;
    }
    state.s[k] -= amount;
    state.i[k] += amount;
  }
}

std::vector<EpidemicState> run_forward(const EpidemicState& initial, const SirParams& params,
                                       const Kernel& kernel, std::size_t steps, StepMode mode,
                                       const RngStream& rng, std::span<const SeedEvent> events,
                                       StepDiagnostics* diag) {
  initial.validate();
  validate_seed_events(events, initial.spec());
  const std::int64_t t_end = initial.t + static_cast<std::int64_t>(steps);
  for (const SeedEvent& ev : events) {
    if (ev.step < initial.t || ev.step > t_end) {
      throw ConfigError("seed event at step " + std::to_string(ev.step) + " is outside the run [" +
                        std::to_string(initial.t) + ", " + std::to_string(t_end) + "]");
    }
  }

  std::vector<EpidemicState> trajectory;
  trajectory.reserve(steps + 1);
  EpidemicState current = initial;
  apply_seed_events(current, events, diag);
  trajectory.push_back(current);
  for (std::size_t n = 0; n < steps; ++n) {
    current = mode == StepMode::kStochastic ? step_stochastic(current, params, kernel, rng, diag)
                                            : step_deterministic(current, params, kernel, diag);
    apply_seed_events(current, events, diag);
    trajectory.push_back(current);
  }
  return trajectory;
}

}  // namespace epitrack
