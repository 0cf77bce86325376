#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "qpart/curvature.hpp"
#include "qpart/errors.hpp"
#include "qpart/geometry.hpp"
#include "qpart/nehari.hpp"
#include "qpart/reduced.hpp"

using namespace qpart;

namespace {

OperatorCoefficients const_coeffs(double a0) {
  OperatorCoefficients oc;
  oc.m = 1;
  oc.a = {0.0, 1.0};
  oc.alpha0 = [a0](double) { return a0; };
  oc.label = "const";
  return oc;
}

DiscreteOperator flat_op(double L, int n, double a0 = 1.0) {
  const Grid g = make_grid_from(0.0, L, n, [](double) { return 1.0; },
                                [](double) { return 0.0; });
  return assemble(g, const_coeffs(a0));
}

double quad_abs_pow(const DiscreteOperator& op, const std::vector<double>& w,
                    double p) {
  double s = 0.0;
  for (int i = 0; i < op.grid.nodes(); ++i)
    s += op.grid.mw[i] * op.grid.beta[i] * std::pow(std::abs(w[i]), p);
  return s;
}

}  // namespace

TEST_CASE("energy bookkeeping helpers") {
  CHECK(energy_factor(4.0) == doctest::Approx(0.25));
  // critical p: 2N/(N-2m); factor equals m/N there.
  CHECK(critical_exponent(4, 1) == doctest::Approx(4.0));
  CHECK(energy_factor(critical_exponent(5, 1)) == doctest::Approx(1.0 / 5.0));
  CHECK(energy_factor(critical_exponent(6, 2)) == doctest::Approx(2.0 / 6.0));
  CHECK_THROWS_AS(critical_exponent(4, 2), ConfigError);
}

TEST_CASE("nehari projection lands on the constraint set and is scale-free") {
  const DiscreteOperator op = flat_op(3.0, 128);
  std::vector<double> w(op.grid.nodes());
  for (int i = 0; i < op.grid.nodes(); ++i)
    w[i] = std::sin(std::acos(-1.0) * op.grid.t[i] / 3.0) + 0.1;
  w.front() = 0.0;
  w.back() = 0.0;

  const double p = 4.0;
  const auto proj = nehari_project(op, w, p);
  const double nrm2 = std::pow(norm_beta_a(op, proj), 2);
  CHECK(nrm2 == doctest::Approx(quad_abs_pow(op, proj, p)).epsilon(1e-10));

  // projecting twice changes nothing
  const auto proj2 = nehari_project(op, proj, p);
  for (int i = 0; i < op.grid.nodes(); ++i)
    CHECK(proj2[i] == doctest::Approx(proj[i]).epsilon(1e-12));

  // projection of 5w equals projection of w
  std::vector<double> w5(w);
  for (double& v : w5) v *= 5.0;
  const auto proj5 = nehari_project(op, w5, p);
  for (int i = 0; i < op.grid.nodes(); i += 13)
    CHECK(proj5[i] == doctest::Approx(proj[i]).epsilon(1e-10));

  std::vector<double> zero(op.grid.nodes(), 0.0);
  CHECK_THROWS_AS(nehari_project(op, zero, p), ConfigError);
}

TEST_CASE("least_energy agrees with the projection energy formula") {
  const DiscreteOperator op = flat_op(5.0, 256);
  const double p = 4.0;
  const IntervalSolution sol = least_energy(op, p);
  REQUIRE(sol.converged);
  // energy = (1/2 - 1/p) (||w||^2 / (int |w|^p)^{2/p})^{p/(p-2)} at the minimizer
  const double Q = std::pow(norm_beta_a(op, sol.w), 2);
  const double P = quad_abs_pow(op, sol.w, p);
  CHECK(Q == doctest::Approx(P).epsilon(1e-8));  // constraint membership
  const double R = Q / std::pow(P, 2.0 / p);
  CHECK(sol.energy ==
        doctest::Approx(energy_factor(p) * std::pow(R, p / (p - 2.0))).epsilon(1e-10));
  CHECK(sol.energy > 1e-8);
}

TEST_CASE("shooting oracle: symmetry and the long-interval limit") {
  const OracleSolution o = shooting_oracle(1.0, 4.0, 40.0);
  // ground state on a long interval approaches the line soliton energy 4/3
  CHECK(o.energy == doctest::Approx(4.0 / 3.0).epsilon(1e-4));
  // slope limit: sqrt(2) sech(t - L/2) plus its boundary image doubles the
  // bare translate slope, giving 4 sqrt(2) e^{-L/2} at leading order
  CHECK(o.slope ==
        doctest::Approx(4.0 * std::sqrt(2.0) * std::exp(-20.0)).epsilon(1e-2));
  // reflection symmetry of the profile
  double worst = 0.0;
  const int n = static_cast<int>(o.t.size()) - 1;
  for (int i = 0; i <= n; ++i)
    worst = std::max(worst, std::abs(o.w[i] - o.w[n - i]));
  CHECK(worst < 1e-6);
  CHECK(o.length == doctest::Approx(40.0).epsilon(1e-10));
}

TEST_CASE("least_energy matches the shooting oracle on (0, L)") {
  // Frozen oracle energies for alpha0 = 1, p = 4 (independent integrator).
  const struct {
    double L, energy;
  } cases[] = {{2.0, 3.83780742569249}, {5.0, 1.433304933507399},
               {10.0, 1.3340583202797778}};
  for (const auto& cs : cases) {
    const OracleSolution o = shooting_oracle(1.0, 4.0, cs.L);
    CHECK(o.energy == doctest::Approx(cs.energy).epsilon(1e-9));
    const DiscreteOperator op = flat_op(cs.L, 3072);
    const IntervalSolution sol = least_energy(op, 4.0);
    REQUIRE(sol.converged);
    CHECK(sol.energy == doctest::Approx(o.energy).epsilon(1e-5));
  }
}

TEST_CASE("least_energy is independent of the initialization") {
  const Profile p = make_sphere(3, 3);
  const Grid g = make_grid(p, 0.4, 2.4, 192);
  const DiscreteOperator op = assemble(g, yamabe_coefficients(p));
  const double pp = critical_exponent(p.dim_N, 1);

  const IntervalSolution a = least_energy(op, pp);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  std::vector<double> init(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) init[i] = uni(rng);
  init.front() = 0.0;
  init.back() = 0.0;
  const IntervalSolution b = least_energy(op, pp, init);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-6));

  // scale invariance of the minimization: init and 10x init agree tightly
  std::vector<double> init10(init);
  for (double& v : init10) v *= 10.0;
  const IntervalSolution c = least_energy(op, pp, init10);
  CHECK(b.energy == doctest::Approx(c.energy).epsilon(1e-8));
}

TEST_CASE("domain monotonicity of the least energy") {
  const Profile p = make_sphere(3, 3);
  const double pp = critical_exponent(p.dim_N, 1);
  const OperatorCoefficients oc = yamabe_coefficients(p);
  auto energy_on = [&](double a, double b) {
    const Grid g = make_grid(p, a, b, 192);
    return least_energy(assemble(g, oc), pp).energy;
  };
  const double wide = energy_on(0.1, 0.9);
  const double narrow = energy_on(0.2, 0.8);
  CHECK(narrow > wide + 1e-8);
  // nested battery
  const double e1 = energy_on(0.3, 2.8);
  const double e2 = energy_on(0.4, 2.7);
  const double e3 = energy_on(0.5, 2.6);
  CHECK(e1 < e2);
  CHECK(e2 < e3);
  CHECK(e1 > 1e-8);
}

TEST_CASE("energy converges at second order under grid refinement") {
  const Profile p = make_sphere(3, 3);
  const OperatorCoefficients oc = yamabe_coefficients(p);
  const double pp = critical_exponent(p.dim_N, 1);
  auto energy_at = [&](int n) {
    const Grid g = make_grid(p, 0.5, 2.5, n);
    return least_energy(assemble(g, oc), pp).energy;
  };
  const double e1 = energy_at(64), e2 = energy_at(128), e3 = energy_at(256);
  const double rate = std::log2(std::abs(e1 - e2) / std::abs(e2 - e3));
  CHECK(rate > 1.5);
  CHECK(rate < 2.6);
}

TEST_CASE("strong residual of the converged solution decays at second order") {
  // On a flat weight the lumped scheme solves the strong stencil exactly,
  // so the order is only visible on a weighted problem.
  const Profile p = make_sphere(3, 3);
  const OperatorCoefficients oc = yamabe_coefficients(p);
  const double pp = critical_exponent(p.dim_N, 1);
  SolveOptions so;
  so.grad_tol = 1e-11;
  so.max_iter = 2000;
  auto residual_at = [&](int n) {
    const Grid g = make_grid(p, 0.4, 2.4, n);
    return least_energy(assemble(g, oc), pp, std::nullopt, so).residual;
  };
  const double r1 = residual_at(128);
  const double r2 = residual_at(256);
  CHECK(r1 / r2 > 2.5);
  CHECK(r1 / r2 < 6.5);

  // And on a flat weight the residual sits at the solver floor.
  const DiscreteOperator flat = flat_op(3.0, 128);
  CHECK(least_energy(flat, 4.0, std::nullopt, so).residual < 1e-8);
}

TEST_CASE("non-convergence is flagged, best-so-far returned") {
  const DiscreteOperator op = flat_op(5.0, 256);
  SolveOptions so;
  so.max_iter = 1;
  const IntervalSolution sol = least_energy(op, 4.0, std::nullopt, so);
  CHECK_FALSE(sol.converged);
  CHECK(sol.energy > 0.0);
  CHECK(sol.iterations <= 1);
}

TEST_CASE("fourth-order operator ground state solves") {
  const Grid g = make_grid_from(0.0, 3.0, 96, [](double) { return 1.0; },
                                [](double) { return 0.0; });
  const OperatorCoefficients oc = einstein_gjms_coefficients(2, {1.0, 2.0});
  const DiscreteOperator op = assemble(g, oc);
  // p inside (2, 2N/(N-4)) for N = 6
  const IntervalSolution sol = least_energy(op, 3.0);
  CHECK(sol.converged);
  CHECK(sol.energy > 1e-8);
  // clamped ends carry w = 0
  CHECK(sol.w.front() == doctest::Approx(0.0));
  CHECK(sol.w.back() == doctest::Approx(0.0));
}

TEST_CASE("fourth-order singular-end intervals: tied endpoint, sane energies") {
  // The free endpoint value would otherwise ride the singular homogeneous
  // branch (finite on the grid, infinite in the continuum norm) and
  // produce absurdly small energies on small singular-end intervals.
  const Profile p = make_sphere(4, 4);
  const OperatorCoefficients oc = einstein_gjms_coefficients(2, {1.0, 2.0});
  const double pp = critical_exponent(p.dim_N, 2);
  auto energy_on = [&](double a, double b) {
    const Grid g = make_grid(p, a, b, 96);
    const DiscreteOperator op = assemble(g, oc);
    if (a == 0.0) CHECK(op.tied_left);
    const IntervalSolution sol = least_energy_best(op, pp);
    REQUIRE(sol.converged);
    return sol.energy;
  };
  const double small = energy_on(0.0, p.d / 8);
  const double half = energy_on(0.0, p.d / 2);
  const double full = energy_on(0.0, p.d);
  CHECK(small > 20.0 * half);  // small domains cost much more
  CHECK(half > full);          // domain monotonicity
  CHECK(full > 1e-8);

  // reflection symmetry of the two halves
  const double right_half = energy_on(p.d / 2, p.d);
  CHECK(half == doctest::Approx(right_half).epsilon(1e-6));
}

TEST_CASE("least_energy on a singular-end interval (natural boundary)") {
  const Profile p = make_sphere(3, 3);
  const Grid g = make_grid(p, 0.0, 1.2, 192);  // contains the left singular orbit
  const DiscreteOperator op = assemble(g, yamabe_coefficients(p));
  CHECK(op.dofs() == g.nodes() - 1);  // only the right end is clamped
  const IntervalSolution sol = least_energy(op, critical_exponent(p.dim_N, 1));
  REQUIRE(sol.converged);
  CHECK(sol.energy > 1e-8);
  CHECK(std::abs(sol.w.back()) < 1e-14);  // clamped
  CHECK(std::abs(sol.w.front()) > 0.0);   // free at the singular orbit
}
