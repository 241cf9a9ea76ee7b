/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

// Scenario-level acceptance checks. Usage:
//   epitrack_acceptance <path to epitrack executable> <scenario config>
// Prints one PASS/FAIL line per criterion; exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "epitrack/assimilation.hpp"
#include "epitrack/commands.hpp"
#include "epitrack/config.hpp"
#include "epitrack/format.hpp"
#include "epitrack/metrics.hpp"
#include "epitrack/sir.hpp"
#include "epitrack/twin.hpp"

using namespace epitrack;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

int run_cli(const fs::path& exe, const std::string& args, const fs::path& log) {
  const std::string cmd = quote(exe) + " " + args + " > " + quote(log) + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// FNV-1a over the sorted (name, contents) pairs of a directory.
std::uint64_t hash_directory(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const std::string& n : names) {
    mix(n);
    mix(read_text_file(dir / n));
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double window_sum(const ScalarField& f, std::size_t row, std::size_t col, std::size_t half) {
  double s = 0.0;
  const GridSpec& g = f.spec();
  for (std::size_t r = row >= half ? row - half : 0; r <= std::min(row + half, g.nrows - 1); ++r)
    for (std::size_t c = col >= half ? col - half : 0; c <= std::min(col + half, g.ncols - 1); ++c) s += f(r, c);
  return s;
}

struct Context {
  fs::path exe;
  fs::path config;
  fs::path work;
  Config cfg;
};

// 1. Default scenario through the command line: protocol constants and runtime.
Verdict protocol_fidelity(const Context& ctx) {
  Verdict v;
  const fs::path out = ctx.work / "c1";
  const auto t0 = Clock::now();
  const int rc = run_cli(ctx.exe, "twin " + quote(ctx.config) + " -o " + quote(out), ctx.work / "c1.log");
  const double elapsed = seconds_since(t0);
  v.require(rc == 0, "twin exit code " + std::to_string(rc));
  if (rc != 0) return v;
  v.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");

  const Manifest m = read_manifest(out / kManifestName);
  const Config echoed = parse_config(m.config);
  const ScenarioConfig& sc = echoed.scenario;
  v.require(sc.ensemble_size == 25, "ensemble size");
  v.require(sc.obs.identity, "identity observation operator");
  v.require(sc.obs_schedule == std::vector<std::int64_t>{10, 20, 30, 40, 50}, "schedule");
  v.require(sc.filter == FilterKind::kEnosi, "filter");
  v.require(echoed.grid.ncols == 50 && echoed.grid.nrows == 50, "50x50 grid");

  const auto rows = parse_metrics_csv(read_text_file(out / kMetricsName));
  v.require(rows.size() == 5, "5 metrics rows");

  const std::size_t p = echoed.grid.size();
  bool integral = true;
  std::size_t members_ok = 0;
  for (std::int64_t step : sc.obs_schedule) {
    std::istringstream in(read_text_file(out / snapshot_name("perturbed_obs", step, "csv")));
    std::string line;
    std::getline(in, line);
    const auto header_fields = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    v.require(header_fields == p, "perturbed obs header width at step " + std::to_string(step));
    std::size_t members = 0;
    while (std::getline(in, line)) {
      ++members;
      std::istringstream fields(line);
      std::string tok;
      std::getline(fields, tok, ',');
      while (std::getline(fields, tok, ',')) {
        const auto val = parse_double(tok);
        if (!val || *val < 0.0 || *val != std::floor(*val)) integral = false;
      }
    }
    members_ok += members == 25;
  }
  v.require(integral, "perturbed observations are nonnegative integers");
  v.require(members_ok == 5, "25 perturbed observation rows per cycle");

  // Zero-disease initialization: the first forecast has neither mean nor spread.
  const ScalarField f1 = read_ascii_grid(out / snapshot_name("forecast_mean", 10)).field;
  const ScalarField s1 = read_ascii_grid(out / snapshot_name("forecast_sd", 10)).field;
  v.require(f1.sum() == 0.0 && s1.sum() == 0.0, "zero-disease ensemble initialization");

  v.note("N=25, identity H, steps 10..50, 5 cycles, integer Y, runtime " + fmt(elapsed, 3) + " s");
  return v;
}

// 2. First cycle: empty forecast, analysis picks up the initial focus.
Verdict first_cycle(const Context& ctx, const TwinResult& run) {
  Verdict v;
  const SeedEvent& origin = ctx.cfg.scenario.seed_events.front();
  const CycleRecord& c1 = run.cycles.front();
  const bool empty = std::all_of(c1.forecast_mean.values().begin(), c1.forecast_mean.values().end(),
                                 [](double x) { return x == 0.0; });
  v.require(empty, "cycle 1 forecast mean not identically zero");
  const double local = window_sum(c1.analysis_mean, origin.row, origin.col, 2);
  v.require(local > 0.0, "analysis mean zero in the 5x5 window at the initial focus");

  const TwinResult again = run_twin(ctx.cfg.scenario);
  v.require(again.cycles.front().analysis_mean == c1.analysis_mean, "cycle 1 analysis not reproducible");
  v.note("forecast sum 0, analysis 5x5 window sum " + fmt(local) + " around (" + std::to_string(origin.row) +
         "," + std::to_string(origin.col) + ")");
  return v;
}

// 3. Jump acquisition at the first cycle after the late seed event.
Verdict jump_acquisition(const Context& ctx, const TwinResult& run) {
  Verdict v;
  const auto& events = ctx.cfg.scenario.seed_events;
  const auto jump = std::find_if(events.begin(), events.end(), [](const SeedEvent& e) { return e.step > 0; });
  if (jump == events.end()) {
    v.require(false, "scenario has no late seed event");
    return v;
  }
  const auto cyc = std::find_if(run.cycles.begin(), run.cycles.end(),
                                [&](const CycleRecord& c) { return c.step > jump->step; });
  if (cyc == run.cycles.end()) {
    v.require(false, "no cycle after the jump");
    return v;
  }
  const GridSpec& g = cyc->truth.spec();
  const std::size_t k = g.index(jump->row, jump->col);

  ScenarioConfig cold = ctx.cfg.scenario;
  cold.filter = FilterKind::kEnkf;
  const TwinResult enkf = run_twin(cold);
  const double enkf_forecast = enkf.cycles[static_cast<std::size_t>(cyc - run.cycles.begin())].forecast_mean[k];

  const double forecast = cyc->forecast_mean[k];
  const double obs = cyc->observation[k];
  const double analysis = cyc->analysis_mean[k];
  v.require(enkf_forecast == 0.0, "EnKF forecast at the jump cell is " + fmt(enkf_forecast));
  v.require(forecast == 0.0, "EnOSI forecast at the jump cell is " + fmt(forecast));
  if (obs > 0.0) {
    v.require(analysis > 0.0, "EnOSI analysis at the jump cell is " + fmt(analysis));
  } else {
    v.note("delivered observation is 0, analysis condition vacuous");
  }
  v.note("step " + std::to_string(cyc->step) + " cell (" + std::to_string(jump->row) + "," +
         std::to_string(jump->col) + "): forecast enkf " + fmt(enkf_forecast) + " enosi " + fmt(forecast) +
         ", observation " + fmt(obs) + ", analysis " + fmt(analysis));
  return v;
}

// 4. Tracking quality across 20 seeds.
Verdict tracking_quality(const Context& ctx) {
  Verdict v;
  const auto t0 = Clock::now();
  std::size_t good_runs = 0;
  std::vector<double> fc1, an5;
  const std::size_t n_seeds = 20;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    ScenarioConfig sc = ctx.cfg.scenario;
    sc.filter = FilterKind::kEnosi;
    sc.master_seed = 1000 + s;
    const TwinResult r = run_twin(sc);
    good_runs += std::all_of(r.cycles.begin(), r.cycles.end(),
                             [](const CycleRecord& c) { return c.rmse_analysis < c.rmse_forecast; });
    fc1.push_back(r.cycles.front().rmse_forecast);
    an5.push_back(r.cycles.back().rmse_analysis);
  }
  const double elapsed = seconds_since(t0);
  const double frac = static_cast<double>(good_runs) / static_cast<double>(n_seeds);
  const double ratio = median(an5) / median(fc1);
  v.require(frac >= 0.9, "analysis beat forecast at every cycle in only " + fmt(100 * frac) + "% of runs");
  v.require(ratio < 0.5, "median ratio " + fmt(ratio));
  v.require(elapsed < 20 * 60.0, "runtime " + fmt(elapsed) + " s");
  v.note(std::to_string(good_runs) + "/20 runs improve at all 5 cycles; median rmse_a(c5)=" + fmt(median(an5)) +
         ", median rmse_f(c1)=" + fmt(median(fc1)) + ", ratio " + fmt(ratio) + "; " + fmt(elapsed, 3) + " s");
  return v;
}

// 5. Filter oracles.
Verdict filter_oracles() {
  Verdict v;

  // (a) EnKF mean -> KF analysis on a p = 3 linear-Gaussian system.
  {
    const GridSpec g{3, 1, 1.0};
    Vector mu(3);
    mu << 1.0, 2.0, 3.0;
    Matrix qf(3, 3);
    qf << 2.0, 0.6, 0.2, 0.6, 1.5, 0.4, 0.2, 0.4, 1.0;
    const ObsOperator h = ObsOperator::subset(3, {0, 2});
    Vector y(2), r(2);
    y << 2.5, 1.0;
    r << 0.5, 1.0;
    const KalmanAnalysis kf = kf_update(StateVector{g, {mu(0), mu(1), mu(2)}}, qf, h, y, r);
    const Vector xa = Eigen::Map<const Vector>(kf.xa.data.data(), 3);
    const Matrix chol = qf.llt().matrixL();

    const std::vector<std::size_t> sizes{100, 1000, 10000};
    const int reps = 200;
    std::vector<double> lx, ly;
    std::string detail;
    for (std::size_t n : sizes) {
      double sq = 0.0;
      for (int rep = 0; rep < reps; ++rep) {
        CounterEngine e = RngStream(5150 + n, static_cast<std::uint64_t>(rep)).engine();
        Matrix x(3, static_cast<Eigen::Index>(n)), yp(2, static_cast<Eigen::Index>(n));
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
          Vector z(3);
          for (int i = 0; i < 3; ++i) z(i) = normal_sample(e);
          x.col(j) = mu + chol * z;
          for (int i = 0; i < 2; ++i) yp(i, j) = y(i) + std::sqrt(r(i)) * normal_sample(e);
        }
        const Ensemble a = enkf_update(Ensemble(g, x), h, yp, r);
        sq += (a.mean() - xa).squaredNorm();
      }
      const double rms = std::sqrt(sq / reps);
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(rms));
      detail += "N=" + std::to_string(n) + ":" + fmt(rms, 3) + " ";
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 3.0;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    v.require(slope >= -0.65 && slope <= -0.35, "(a) slope " + fmt(slope));
    v.note("(a) slope " + fmt(slope) + " [" + detail.substr(0, detail.size() - 1) + "]");
  }

  // (b) EnOSI on a 2x2 grid against explicit matrix arithmetic.
  {
    const GridSpec g{2, 2, 1.0};
    const double L = 1.5, sigma2 = 1.0;
    Matrix q(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double dr = i / 2 - j / 2, dc = i % 2 - j % 2;
        q(i, j) = sigma2 * std::exp(-std::sqrt(dr * dr + dc * dc) / L);
      }
    Matrix hd = Matrix::Zero(2, 4);
    hd(0, 0) = 1.0;
    hd(1, 3) = 1.0;
    Matrix x(4, 5), y(2, 5);
    x << 0, 1, 2, 3, 4, 5, 4, 3, 2, 1, 0.5, 0.5, 8, 0, 2, 1, 1, 1, 6, 0;
    y << 3, 0, 1, 7, 2, 0, 2, 4, 1, 9;
    Vector r(2);
    r << 3.0, 1.0;
    const Matrix s = hd * q * hd.transpose() + Matrix(r.asDiagonal());
    const Matrix oracle = x + q * hd.transpose() * s.inverse() * (y - hd * x);
    const Matrix got =
        enosi_update(Ensemble(g, x), ObsOperator::subset(4, {0, 3}), y, r, build_stationary_covariance(g, sigma2, L))
            .matrix();
    const double err = (got - oracle).cwiseAbs().maxCoeff();
    v.require(err < 1e-10, "(b) max deviation " + fmt(err));
    v.note("(b) max deviation " + fmt(err, 3));
  }

  // (c) Kalman analysis never increases total variance.
  {
    CounterEngine e = RngStream(31337, 0).engine();
    std::size_t ok = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Index p = 2 + trial % 7;
      Matrix a(p, p);
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) a(i, j) = normal_sample(e);
      const Matrix qf = a * a.transpose() + 0.05 * Matrix::Identity(p, p);
      std::vector<std::size_t> idx;
      for (Eigen::Index k = 0; k < p; ++k)
        if (e.uniform() < 0.6) idx.push_back(static_cast<std::size_t>(k));
      if (idx.empty()) idx.push_back(static_cast<std::size_t>(p - 1));
      const auto m = static_cast<Eigen::Index>(idx.size());
      Vector r(m), y(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        r(k) = 0.1 + 5.0 * e.uniform();
        y(k) = 10.0 * normal_sample(e);
      }
      const StateVector xf{GridSpec{static_cast<std::size_t>(p), 1, 1.0}, std::vector<double>(p, 1.0)};
      const KalmanAnalysis ka = kf_update(xf, qf, ObsOperator::subset(static_cast<std::size_t>(p), idx), y, r);
      const double diff = ka.qa.trace() - qf.trace();
      worst = std::max(worst, diff);
      ok += diff <= 0.0;
    }
    v.require(ok == 100, "(c) " + std::to_string(ok) + "/100 instances");
    v.note("(c) " + std::to_string(ok) + "/100, max trace change " + fmt(worst, 3));
  }
  return v;
}

// 6. Dynamics invariants.
Verdict dynamics_invariants() {
  Verdict v;
  const GridSpec g{10, 10, 1.0};
  SirParams p;
  p.beta = 0.002;
  p.gamma = 0.1;
  p.alpha = 1.0;
  p.dt = 1.0;
  p.kernel_radius_cells = 3;
  const Kernel k = make_kernel(p, g.cellsize);

  ScalarField pop(g);
  for (std::size_t q = 0; q < pop.size(); ++q) pop[q] = static_cast<double>(200 + (q * 53) % 400);
  EpidemicState start = EpidemicState::disease_free(pop);

  // 40 consecutive outbreaks of 250 steps each, restarted from the
  // disease-free population with a fresh focus.
  {
    const std::size_t steps = 10000;
    const std::size_t episode = 250;
    SirParams slow = p;
    slow.beta = 0.0006;
    slow.gamma = 0.05;
    const RngStream rng(6060, 0);
    EpidemicState cur = start;
    std::size_t conserved = 0, nonneg = 0, active = 0;
    StepDiagnostics diag;
    for (std::size_t n = 0; n < steps; ++n) {
      if (n % episode == 0) {
        const std::size_t cell = (n / episode * 37) % g.size();
        const auto t = cur.t;
        cur = start;
        cur.t = t;
        const SeedEvent focus{t, cell / g.ncols, cell % g.ncols, 5.0};
        apply_seed_events(cur, std::span<const SeedEvent>(&focus, 1), &diag);
      }
      EpidemicState next = step_stochastic(cur, slow, k, rng, &diag);
      bool c = true, nn = true;
      for (std::size_t q = 0; q < g.size(); ++q) {
        c = c && (next.s[q] + next.i[q] + next.r[q] == pop[q]);
        nn = nn && next.s[q] >= 0.0 && next.i[q] >= 0.0 && next.r[q] >= 0.0;
      }
      conserved += c;
      nonneg += nn;
      active += next.i.sum() > 0.0;
      cur = std::move(next);
    }
    v.require(conserved == steps, "conservation held in " + std::to_string(conserved) + " steps");
    v.require(nonneg == steps, "nonnegativity held in " + std::to_string(nonneg) + " steps");
    v.require(active > steps / 2, "only " + std::to_string(active) + " steps with active infection");
    v.note("10^4 steps: bitwise S+I+R and nonnegativity in all steps (" + std::to_string(active) +
           " with active infection, " + std::to_string(diag.total()) + " clamped transfers)");
  }

  // One-step mean against the Euler step.
  {
    EpidemicState st = start;
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double inf = std::floor(0.1 * st.s[q] * static_cast<double>((q * 7) % 5) / 4.0);
      st.s[q] -= inf;
      st.i[q] += inf;
    }
    const EpidemicState det = step_deterministic(st, p, k);
    const int reps = 10000;
    std::vector<double> di(g.size(), 0.0), di2(g.size(), 0.0), dr(g.size(), 0.0), dr2(g.size(), 0.0);
    double tot_inf = 0.0, tot_inf2 = 0.0, tot_rem = 0.0, tot_rem2 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const EpidemicState next = step_stochastic(st, p, k, RngStream(777, static_cast<std::uint64_t>(rep)));
      double ti = 0.0, tr = 0.0;
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double inf = st.s[q] - next.s[q];
        const double rem = next.r[q] - st.r[q];
        di[q] += inf;
        di2[q] += inf * inf;
        dr[q] += rem;
        dr2[q] += rem * rem;
        ti += inf;
        tr += rem;
      }
      tot_inf += ti;
      tot_inf2 += ti * ti;
      tot_rem += tr;
      tot_rem2 += tr * tr;
    }
    auto zscore = [reps](double s, double s2, double expect) {
      const double mean = s / reps;
      const double var = (s2 - reps * mean * mean) / (reps - 1);
      const double se = std::sqrt(std::max(var, 0.0) / reps);
      if (se == 0.0) return mean == expect ? 0.0 : std::numeric_limits<double>::infinity();
      return std::abs(mean - expect) / se;
    };
    double exp_inf = 0.0, exp_rem = 0.0;
    std::size_t outside = 0, tested = 0;
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double e_inf = st.s[q] - det.s[q];
      const double e_rem = det.r[q] - st.r[q];
      exp_inf += e_inf;
      exp_rem += e_rem;
      outside += zscore(di[q], di2[q], e_inf) > 3.0;
      outside += zscore(dr[q], dr2[q], e_rem) > 3.0;
      tested += 2;
    }
    const double z_inf = zscore(tot_inf, tot_inf2, exp_inf);
    const double z_rem = zscore(tot_rem, tot_rem2, exp_rem);
    v.require(z_inf <= 3.0, "total new infections off by " + fmt(z_inf) + " SE");
    v.require(z_rem <= 3.0, "total removals off by " + fmt(z_rem) + " SE");
    // About 0.27% of per-cell comparisons land beyond 3 SE by chance.
    v.require(outside <= tested / 50, std::to_string(outside) + " per-cell comparisons beyond 3 SE");
    v.note("one-step totals within " + fmt(std::max(z_inf, z_rem), 3) + " SE over 10^4 replicates; " +
           std::to_string(outside) + "/" + std::to_string(tested) + " per-cell comparisons beyond 3 SE");
  }
  return v;
}

// 7. Byte-identical output directories for repeated invocations.
Verdict determinism(const Context& ctx) {
  Verdict v;
  std::string detail;
  for (const char* cmd : {"simulate", "twin"}) {
    std::uint64_t h[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
      const fs::path out = ctx.work / (std::string("c7_") + cmd + "_" + std::to_string(k));
      const int rc = run_cli(ctx.exe, std::string(cmd) + " " + quote(ctx.config) + " --pgm -o " + quote(out),
                             ctx.work / ("c7_" + std::string(cmd) + ".log"));
      v.require(rc == 0, std::string(cmd) + " exit code " + std::to_string(rc));
      if (rc != 0) return v;
      h[k] = hash_directory(out);
    }
    v.require(h[0] == h[1], std::string(cmd) + " outputs differ");
    detail += std::string(cmd) + " " + hex(h[0]) + " ";
  }
  std::string logs[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path log = ctx.work / ("c7_metrics_" + std::to_string(k) + ".log");
    const int rc = run_cli(ctx.exe, "metrics " + quote(ctx.work / "c7_twin_0"), log);
    v.require(rc == 0, "metrics exit code " + std::to_string(rc));
    logs[k] = read_text_file(log);
  }
  v.require(logs[0] == logs[1], "metrics output differs");
  v.note(detail + "metrics stdout identical");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: epitrack_acceptance <epitrack executable> <scenario config>\n";
    return 2;
  }
  Context ctx;
  ctx.exe = fs::absolute(argv[1]);
  ctx.config = fs::absolute(argv[2]);
  ctx.work = fs::temp_directory_path() / ("epitrack_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(ctx.work);
  fs::create_directories(ctx.work);

  int failures = 0;
  auto report = [&failures](int id, const char* name, const std::function<Verdict()>& fn) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << v.detail << std::endl;
  };

  ctx.cfg = load_config(ctx.config);
  TwinResult base;
  bool have_base = false;
  auto baseline = [&]() -> const TwinResult& {
    if (!have_base) {
      base = run_twin(ctx.cfg.scenario);
      have_base = true;
    }
    return base;
  };

  report(1, "protocol fidelity", [&] { return protocol_fidelity(ctx); });
  report(2, "empty first forecast, partial first analysis", [&] { return first_cycle(ctx, baseline()); });
  report(3, "jump acquisition", [&] { return jump_acquisition(ctx, baseline()); });
  report(4, "tracking quality over 20 seeds", [&] { return tracking_quality(ctx); });
  report(5, "filter correctness oracles", [] { return filter_oracles(); });
  report(6, "dynamics invariants", [] { return dynamics_invariants(); });
  report(7, "determinism", [&] { return determinism(ctx); });

  std::error_code ec;
  fs::remove_all(ctx.work, ec);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
