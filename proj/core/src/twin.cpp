/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "epitrack/twin.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "epitrack/error.hpp"
#include "epitrack/metrics.hpp"

namespace epitrack {

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::kKf:
      return "kf";
    case FilterKind::kEnkf:
      return "enkf";
    case FilterKind::kEnosi:
      return "enosi";
  }
  return "unknown";
}

FilterKind parse_filter(const std::string& name) {
  if (name == "kf") return FilterKind::kKf;
  if (name == "enkf") return FilterKind::kEnkf;
  if (name == "enosi") return FilterKind::kEnosi;
  throw ConfigError("unknown filter '" + name + "' (expected kf, enkf or enosi)");
}

ObsOperator ObsSpec::resolve(std::size_t p) const {
  return identity ? ObsOperator::identity(p) : ObsOperator::subset(p, indices);
}

void ScenarioConfig::validate() const {
  population.spec().validate();
  for (double v : population.values()) {
    if (!(v >= 0.0)) throw ConfigError("population densities must be >= 0");
  }
  sir.validate();
  validate_seed_events(seed_events, population.spec());
  if (obs_schedule.empty()) throw ConfigError("observation schedule is empty");
  for (std::size_t c = 0; c < obs_schedule.size(); ++c) {
    if (obs_schedule[c] < 1) throw ConfigError("observation steps must be >= 1");
    if (c > 0 && obs_schedule[c] <= obs_schedule[c - 1]) {
      throw ConfigError("observation schedule must be strictly increasing");
    }
  }
  for (const SeedEvent& ev : seed_events) {
    if (ev.step > obs_schedule.back()) {
      throw ConfigError("seed event at step " + std::to_string(ev.step) + " falls after the last observation");
    }
  }
  if (ensemble_size < 1) throw ConfigError("ensemble size must be >= 1");
  if (filter != FilterKind::kKf && ensemble_size < 2) {
    throw ConfigError("ensemble filters need at least two members");
  }
  if (!obs.identity) ObsOperator::subset(population.size(), obs.indices);
  if (!(cov.sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
  const double cellsize = population.spec().cellsize;
  if (!(cov.resolved_corr_length(cellsize) > 0.0)) throw ConfigError("corr_length must be positive");
  if (!(cov.resolved_cutoff(population.spec()) >= 0.0)) throw ConfigError("cutoff must be >= 0");
  if (filter == FilterKind::kKf && population.size() > cov.dense_cap) {
    throw ConfigError("filter kf needs a dense " + std::to_string(population.size()) + "x" +
                      std::to_string(population.size()) + " covariance, which exceeds the dense cap of " +
                      std::to_string(cov.dense_cap) + " cells");
  }
}

std::vector<EpidemicState> generate_truth(const ScenarioConfig& cfg, StepDiagnostics* diag) {
  cfg.validate();
  const Kernel kernel = make_kernel(cfg.sir, cfg.population.spec().cellsize);
  return run_forward(EpidemicState::disease_free(cfg.population), cfg.sir, kernel,
                     static_cast<std::size_t>(cfg.obs_schedule.back()), StepMode::kStochastic,
                     TwinStreams::truth(cfg.master_seed), cfg.seed_events, diag);
}

ObsBatch generate_observations(const ScalarField& truth_i, const ObsOperator& h, const RngStream& rng,
                               std::int64_t step) {
  if (h.state_dim() != truth_i.size()) throw DimensionError("H does not match the truth grid");
  const auto m = static_cast<Eigen::Index>(h.obs_dim());
  Vector y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const std::size_t cell = h.index(static_cast<std::size_t>(k));
    CounterEngine eng = rng.substream(cell, static_cast<std::uint64_t>(step), StreamTag::kObservation);
    y(k) = static_cast<double>(poisson_sample(truth_i[cell], eng));
  }
  return ObsBatch{y, poisson_obs_variance(y), step};
}

EpidemicState propagate(EpidemicState state, std::int64_t to_step, const SirParams& params, const Kernel& kernel,
                        const RngStream& rng, StepDiagnostics* diag) {
  while (state.t < to_step) state = step_stochastic(state, params, kernel, rng, diag);
  return state;
}

namespace {

ScalarField field_from(const GridSpec& spec, const Vector& v) {
  return ScalarField(spec, std::vector<double>(v.begin(), v.end()));
}

Matrix infected_matrix(const std::vector<EpidemicState>& members) {
  const auto p = static_cast<Eigen::Index>(members.front().i.size());
  Matrix x(p, static_cast<Eigen::Index>(members.size()));
  for (std::size_t j = 0; j < members.size(); ++j) {
    x.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(members[j].i.values().data(), p);
  }
  return x;
}

ScalarField observation_field(const GridSpec& spec, const ObsOperator& h, const Vector& y) {
  ScalarField out = ScalarField::filled(spec, h.is_identity() ? 0.0 : spec.nodata_value);
  for (std::size_t k = 0; k < h.obs_dim(); ++k) out[h.index(k)] = y(static_cast<Eigen::Index>(k));
  return out;
}

}  // namespace

TwinResult run_twin(const ScenarioConfig& cfg, const TwinOptions& options) {
  cfg.validate();
  const GridSpec& spec = cfg.population.spec();
  const std::size_t p = spec.size();
  const std::size_t n = cfg.ensemble_size;
  const Kernel kernel = make_kernel(cfg.sir, spec.cellsize);
  const ObsOperator h = cfg.obs.resolve(p);

  std::vector<std::size_t> order = options.propagation_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(n);
    std::iota(expected.begin(), expected.end(), 0);
    if (sorted != expected) throw ConfigError("propagation order must be a permutation of the members");
  }

  TwinResult result;
  result.truth = generate_truth(cfg, &result.truth_diagnostics);

  const double cellsize = spec.cellsize;
  const bool dense_q = cfg.filter == FilterKind::kKf;
  std::optional<StationaryCovariance> q;
  if (cfg.filter != FilterKind::kEnkf) {
    q = build_stationary_covariance(spec, cfg.cov.sigma2, cfg.cov.resolved_corr_length(cellsize),
                                    dense_q ? std::numeric_limits<double>::infinity()
                                            : cfg.cov.resolved_cutoff(spec),
                                    cfg.cov.dense_cap);
  }

  // Ensemble members (enkf/enosi) or the single mean trajectory (kf) start
  // from the population with no disease at all.
  const std::size_t n_tracks = cfg.filter == FilterKind::kKf ? 1 : n;
  std::vector<EpidemicState> members(n_tracks, EpidemicState::disease_free(cfg.population));
  Matrix kf_cov = Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(dense_q ? p : 0));
  std::unique_ptr<EnosiGain> gain;

  const RngStream obs_rng = TwinStreams::observations(cfg.master_seed);
  for (std::size_t c = 0; c < cfg.obs_schedule.size(); ++c) {
    const std::int64_t step = cfg.obs_schedule[c];
    try {
      CycleRecord rec;
      rec.cycle = c + 1;
      rec.step = step;
      rec.truth = result.truth[static_cast<std::size_t>(step)].i;

      // Forecast.
      if (cfg.filter == FilterKind::kKf) {
        // Persistence model for the error covariance: Qf = Qa + Sigma.
        while (members[0].t < step) {
          members[0] = step_deterministic(members[0], cfg.sir, kernel, &result.member_diagnostics);
        }
        kf_cov += q->dense();
      } else {
        for (std::size_t j : order) {
          members[j] = propagate(std::move(members[j]), step, cfg.sir, kernel,
                                 TwinStreams::member(cfg.master_seed, j), &result.member_diagnostics);
        }
      }
      const Ensemble forecast(spec, infected_matrix(members));
      rec.forecast_mean = field_from(spec, forecast.mean());
      rec.forecast_sd = dense_q ? field_from(spec, kf_cov.diagonal().cwiseMax(0.0).cwiseSqrt())
                                : field_from(spec, forecast.stddev());

      // Observations.
      const ObsBatch obs = generate_observations(rec.truth, h, obs_rng, step);
      rec.observation = observation_field(spec, h, obs.y);
      rec.r_diag = obs.r_diag;

      // Analysis.
      Ensemble analysis = forecast;
      if (cfg.filter == FilterKind::kKf) {
        rec.perturbed_obs = obs.y;
        const KalmanAnalysis ka = kf_update(forecast.member(0), kf_cov, h, obs.y, obs.r_diag);
        analysis = Ensemble::from_members({ka.xa});
        kf_cov = ka.qa;
      } else {
        rec.perturbed_obs = perturb_observations_poisson(obs.y, n, TwinStreams::perturbations(cfg.master_seed, step));
        if (cfg.filter == FilterKind::kEnkf) {
          analysis = enkf_update(forecast, h, rec.perturbed_obs, obs.r_diag);
        } else {
          if (!gain || !gain->matches(h, obs.r_diag)) {
            gain = std::make_unique<EnosiGain>(*q, h, obs.r_diag, cfg.cov.dense_cap);
            ++result.gain_factorizations;
          }
          analysis = gain->apply(forecast, rec.perturbed_obs);
        }
      }
      CensorResult censored = censor_nonnegative(analysis);
      rec.censored_count = censored.censored;
      const Matrix& xa = censored.ensemble.matrix();
      for (std::size_t j = 0; j < members.size(); ++j) {
        std::copy(xa.col(static_cast<Eigen::Index>(j)).begin(), xa.col(static_cast<Eigen::Index>(j)).end(),
                  members[j].i.values().begin());
      }

      rec.analysis_mean = field_from(spec, censored.ensemble.mean());
      rec.analysis_sd = dense_q ? field_from(spec, kf_cov.diagonal().cwiseMax(0.0).cwiseSqrt())
                                : field_from(spec, censored.ensemble.stddev());
      rec.rmse_forecast = rmse(rec.forecast_mean, rec.truth);
      rec.rmse_analysis = rmse(rec.analysis_mean, rec.truth);
      result.cycles.push_back(std::move(rec));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw Error("cycle " + std::to_string(c + 1) + " (step " + std::to_string(step) + "): " + e.what());
    }
  }
  return result;
}

}  // namespace epitrack
