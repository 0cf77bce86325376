#include <benchmark/benchmark.h>

#include "qpart/curvature.hpp"
#include "qpart/geometry.hpp"
#include "qpart/partition.hpp"

static void BM_EnergyTable(benchmark::State& state) {
  const qpart::Profile p = qpart::make_sphere(3, 3);
  const qpart::OperatorCoefficients oc = qpart::yamabe_coefficients(p);
  const double pp = qpart::critical_exponent(p.dim_N, 1);
  qpart::TableOptions opts;
  opts.n_interval = 64;
  for (auto _ : state) {
    auto tab = qpart::energy_table(p, oc, pp, state.range(0), opts);
    benchmark::DoNotOptimize(tab.E[0].back());
  }
}
BENCHMARK(BM_EnergyTable)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_DpPartition(benchmark::State& state) {
  const qpart::Profile p = qpart::make_sphere(3, 3);
  const qpart::OperatorCoefficients oc = qpart::yamabe_coefficients(p);
  const double pp = qpart::critical_exponent(p.dim_N, 1);
  qpart::TableOptions opts;
  opts.n_interval = 64;
  const auto tab = qpart::energy_table(p, oc, pp, 16, opts);
  for (auto _ : state) {
    auto part = qpart::dp_partition(tab, 3);
    benchmark::DoNotOptimize(part.total_energy);
  }
}
BENCHMARK(BM_DpPartition);
