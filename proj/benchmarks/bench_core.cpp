/*
 * (C) Copyright 2026 The epitrack Authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <benchmark/benchmark.h>

#include "epitrack/assimilation.hpp"
#include "epitrack/config.hpp"
#include "epitrack/kernel.hpp"
#include "epitrack/random.hpp"
#include "epitrack/sir.hpp"

using namespace epitrack;

namespace {

EpidemicState outbreak(std::size_t n) {
  const GridSpec g{n, n, 1.0};
  EpidemicState st = EpidemicState::disease_free(ScalarField::filled(g, 200.0));
  for (std::size_t r = n / 3; r < 2 * n / 3; ++r)
    for (std::size_t c = n / 3; c < 2 * n / 3; ++c) {
      st.s(r, c) -= 20.0;
      st.i(r, c) += 20.0;
    }
  return st;
}

void BM_Convolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const EpidemicState st = outbreak(n);
  const Kernel k = build_kernel(1.5, static_cast<std::size_t>(state.range(1)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(st.i, k));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_Convolve)->Args({50, 11})->Args({100, 11})->Args({200, 5});

void BM_StepStochastic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SirParams p;
  p.beta = 0.01;
  p.gamma = 0.25;
  p.alpha = 1.5;
  const Kernel k = make_kernel(p, 1.0);
  const EpidemicState st = outbreak(n);
  const RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(step_stochastic(st, p, k, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_StepStochastic)->Arg(50)->Arg(100);

void BM_Poisson(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  CounterEngine e = RngStream(2, 0).engine();
  for (auto _ : state) benchmark::DoNotOptimize(poisson_sample(lambda, e));
}
BENCHMARK(BM_Poisson)->Arg(1)->Arg(20)->Arg(100)->Arg(10000);

void BM_EnosiGain(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GridSpec g{n, n, 1.0};
  const double cutoff = state.range(1) ? 8.0 : std::numeric_limits<double>::infinity();
  const StationaryCovariance q = build_stationary_covariance(g, 25.0, 2.0, cutoff);
  const ObsOperator h = ObsOperator::identity(g.size());
  const Vector r = Vector::Constant(static_cast<Eigen::Index>(g.size()), 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(EnosiGain(q, h, r, 0));
}
BENCHMARK(BM_EnosiGain)->Args({30, 0})->Args({30, 1})->Args({50, 1})->Unit(benchmark::kMillisecond);

void BM_EnosiApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GridSpec g{n, n, 1.0};
  const StationaryCovariance q = build_stationary_covariance(g, 25.0, 2.0);
  const ObsOperator h = ObsOperator::identity(g.size());
  const auto p = static_cast<Eigen::Index>(g.size());
  const EnosiGain gain(q, h, Vector::Constant(p, 4.0));
  const Ensemble ens(g, Matrix::Constant(p, 25, 3.0));
  const Matrix y = Matrix::Constant(p, 25, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(gain.apply(ens, y));
}
BENCHMARK(BM_EnosiApply)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
