#include <benchmark/benchmark.h>

#include "qpart/soliton.hpp"

static void BM_SolveC(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(qpart::solve_c(1e-13));
}
BENCHMARK(BM_SolveC);

static void BM_Shoot(benchmark::State& state) {
  const double c = qpart::solve_c(1e-13);
  qpart::ShootOptions opt;
  opt.step = 1.0 / state.range(0);
  for (auto _ : state) {
    auto sol = qpart::shoot(c, opt);
    benchmark::DoNotOptimize(sol.domain_length);
  }
}
BENCHMARK(BM_Shoot)->Arg(500)->Arg(1000)->Arg(4000);

static void BM_SolitonPipeline(benchmark::State& state) {
  for (auto _ : state) {
    auto sol = qpart::run_soliton_pipeline({});
    benchmark::DoNotOptimize(qpart::total_volume(sol));
  }
}
BENCHMARK(BM_SolitonPipeline);

BENCHMARK_MAIN();
