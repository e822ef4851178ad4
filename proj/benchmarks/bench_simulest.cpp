#include <benchmark/benchmark.h>

#include "simulest/estimator.hpp"
#include "simulest/hardness.hpp"
#include "simulest/stats.hpp"
#include "simulest/wperm.hpp"

using namespace simulest;

static void BM_Orbit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = wperm::WeightedPermutation::shift_with_unit_weight(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(wperm::orbit(x, {n, 2'000'000}));
}
BENCHMARK(BM_Orbit)->DenseRange(4, 8, 2);

static void BM_EstimatorMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto o = rep::random_observable(2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimator::estimator_matrix(o, n, 2));
}
BENCHMARK(BM_EstimatorMatrix)->DenseRange(3, 7)->Unit(benchmark::kMillisecond);

// First iteration pays for the observable-independent structure; later ones hit the cache.
static void BM_SuiteBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const auto o = rep::random_observable(2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimator::EstimatorSuite::build(o, n));
}
BENCHMARK(BM_SuiteBuild)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_SampleOutcomes(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const auto o = rep::random_observable(2, rng);
  const auto rho = rep::random_density(2, rng);
  const auto suite = estimator::EstimatorSuite::build(o, n);
  for (auto _ : state) benchmark::DoNotOptimize(suite.sample_outcomes(rho, 64, rng));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_SampleOutcomes)->DenseRange(4, 10, 2);

static void BM_SymbolicMoments(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const auto o = rep::random_observable(2, rng);
  const auto rho = rep::random_density(2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimator::exact_moments_symbolic(o, rho, n, 3));
}
BENCHMARK(BM_SymbolicMoments)->DenseRange(4, 12, 4)->Unit(benchmark::kMillisecond);

static void BM_RunSimultaneous(benchmark::State& state) {
  const auto threads = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  const auto o = rep::random_observable(2, rng);
  const auto rho = rep::random_density(2, rng);
  stats::RunOptions opt;
  opt.threads = threads;
  opt.copies = 8;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(stats::run_simultaneous(rho, o, 3, 1.0, seed++, opt));
}
BENCHMARK(BM_RunSimultaneous)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_HardnessSweep(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hardness::sweep({10, 100, 1000}, {1e-4, 1e-3, 1e-2, 1e-1}));
}
BENCHMARK(BM_HardnessSweep);
BENCHMARK_MAIN();
