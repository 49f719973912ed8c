// Microbenchmarks for the hot paths: stream derivation, Brownian path
// construction, single field evaluations, and full path realizations.

#include <benchmark/benchmark.h>

#include <vector>

#include <mlpbsde/mlp.hpp>
#include <mlpbsde/pathgrid.hpp>
#include <mlpbsde/problem.hpp>
#include <mlpbsde/randomness.hpp>

using namespace mlpbsde;

static void BM_StreamDraws(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const MasterSeed seed{42};
  const ThetaPath theta({1, 3, 0, -2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(node_draws(seed, theta, d));
  }
  state.SetItemsProcessed(state.iterations() * (d + 1));
}
BENCHMARK(BM_StreamDraws)->Arg(1)->Arg(10)->Arg(100);

static void BM_BrownianPath(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(brownian_path(MasterSeed{7}, d, 4, 4, 1.0));
  }
}
BENCHMARK(BM_BrownianPath)->Arg(1)->Arg(10);

static void BM_MlpEvaluate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = builtin_problem(Family::cos_affine, 1);
  const std::vector<double> x = {0.2};
  std::uint64_t s = 0;
  for (auto _ : state) {
    CostCounters cc;
    benchmark::DoNotOptimize(
        mlp_evaluate(p, MasterSeed{++s}, ThetaPath{}, MlpConfig{n, 4}, 0.0, x, cc));
  }
}
BENCHMARK(BM_MlpEvaluate)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

static void BM_PathEstimate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = builtin_problem(Family::cos_affine, 1);
  std::uint64_t s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(path_estimate(p, MasterSeed{++s}, n, n));
  }
}
BENCHMARK(BM_PathEstimate)->Arg(2)->Arg(3)->Arg(4);

static void BM_PathEstimateDim(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto p = builtin_problem(Family::cos_affine, d);
  std::uint64_t s = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(path_estimate(p, MasterSeed{++s}, 3, 3));
  }
}
BENCHMARK(BM_PathEstimateDim)->Arg(1)->Arg(5)->Arg(10);

BENCHMARK_MAIN();
