#include <benchmark/benchmark.h>

#include "qpart/curvature.hpp"
#include "qpart/geometry.hpp"
#include "qpart/nehari.hpp"
#include "qpart/reduced.hpp"

namespace {

qpart::DiscreteOperator sphere_op(int n) {
  static const qpart::Profile p = qpart::make_sphere(3, 3);
  static const qpart::OperatorCoefficients oc = qpart::yamabe_coefficients(p);
  return qpart::assemble(qpart::make_grid(p, 0.4, 2.6, n), oc);
}

}  // namespace

static void BM_Assemble(benchmark::State& state) {
  const qpart::Profile p = qpart::make_sphere(3, 3);
  const qpart::OperatorCoefficients oc = qpart::yamabe_coefficients(p);
  const auto grid = qpart::make_grid(p, 0.4, 2.6, state.range(0));
  for (auto _ : state) {
    auto op = qpart::assemble(grid, oc);
    benchmark::DoNotOptimize(op.smallest_rayleigh);
  }
}
BENCHMARK(BM_Assemble)->Arg(128)->Arg(512);

static void BM_LeastEnergy(benchmark::State& state) {
  const auto op = sphere_op(state.range(0));
  const double p = qpart::critical_exponent(5, 1);
  for (auto _ : state) {
    auto sol = qpart::least_energy(op, p);
    benchmark::DoNotOptimize(sol.energy);
  }
}
BENCHMARK(BM_LeastEnergy)->Arg(96)->Arg(192)->Arg(384);
