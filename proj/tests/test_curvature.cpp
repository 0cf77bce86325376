#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "qpart/curvature.hpp"
#include "qpart/errors.hpp"
#include "qpart/geometry.hpp"
#include "qpart/numerics.hpp"
#include "qpart/reduced.hpp"
#include "qpart/soliton.hpp"

using namespace qpart;

TEST_CASE("dimensional constants") {
  const DimConstants d4 = dim_constants(4);
  CHECK(d4.a == doctest::Approx(1.0 / 6.0).epsilon(1e-16));
  CHECK(d4.c == doctest::Approx(0.5).epsilon(1e-16));
  CHECK(d4.b == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(std::abs(2.0 * d4.a - d4.c + 1.0 / 6.0) < 3e-17);

  for (int N = 4; N <= 20; ++N) {
    const DimConstants dc = dim_constants(N);
    CHECK(dc.a > 0.0);
    CHECK(dc.b > 0.0);
    CHECK(dc.c > 0.0);
    const double two_a_minus_c = 2.0 * dc.a - dc.c;
    CHECK((two_a_minus_c > 0.0) == (N > 4));
    const double combo = dc.b - 2.0 * dc.a + dc.c;
    CHECK((combo > 0.0) == (N == 4 || N == 5));
  }
  CHECK_THROWS_AS(dim_constants(3), ConfigError);
}

TEST_CASE("soliton_q equals q_general after the Laplacian substitution") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> uni(0.1, 7.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 4 + static_cast<int>(rng() % 10);
    const double R = uni(rng), ric_sq = uni(rng), ric_ff = uni(rng);
    const double lap_R = 2.0 * R - 2.0 * ric_sq + 2.0 * ric_ff;
    const double lhs = soliton_q(N, R, ric_sq, ric_ff);
    const double rhs = q_general(N, R, lap_R, ric_sq);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  CHECK(soliton_q(5, 0.0, 0.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("round four-sphere as a negative control") {
  // Einstein S^4: R = 12, Ric = 3g, |Ric|^2 = 36, zero potential.
  // The true Q uses Lap R = 0: (1/6) 144 - (1/2) 36 = 6.
  CHECK(q_general(4, 12.0, 0.0, 36.0) == doctest::Approx(6.0).epsilon(1e-14));
  // The shrinking-soliton substitution assumes Lap R = 2R - 2|Ric|^2 (+2 ric_ff),
  // which is -48 here, not 0, so the two formulas must disagree by a/6 * 48 = 8.
  const double sq = soliton_q(4, 12.0, 36.0, 0.0);
  CHECK(sq == doctest::Approx(14.0).epsilon(1e-14));
  CHECK(sq - q_general(4, 12.0, 0.0, 36.0) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("soliton_q agrees with the trajectory Q pointwise") {
  SolitonSolution sol = run_soliton_pipeline({});
  for (std::size_t i = 0; i < sol.t_grid.size(); i += 97) {
    const double ric_ff =
        sol.potential_fp[i] * sol.potential_fp[i] * sol.Ric11[i];
    const double q = soliton_q(4, sol.R[i], sol.ricci_sq[i], ric_ff);
    CHECK(q == doctest::Approx(sol.Q[i]).epsilon(1e-10));
  }
}

TEST_CASE("q_general with a finite-difference radial Laplacian matches q_profile") {
  ShootOptions opt;
  opt.step = 2e-4;
  SolitonSolution sol = run_soliton_pipeline(opt);
  const Profile prof = profile_from_soliton(sol);
  const double dt = sol.t_grid[1] - sol.t_grid[0];
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < sol.t_grid.size(); ++i) {
    const double t = sol.t_grid[i];
    if (t < 0.15 || t > sol.domain_length - 0.15) continue;  // h blows up at ends
    const double rp = (sol.R[i + 1] - sol.R[i - 1]) / (2.0 * dt);
    const double rpp = (sol.R[i + 1] - 2.0 * sol.R[i] + sol.R[i - 1]) / (dt * dt);
    const double lap_R = rpp + prof.mean_curvature(t) * rp;
    const double q = q_general(4, sol.R[i], lap_R, sol.ricci_sq[i]);
    worst = std::max(worst, std::abs(q - sol.Q[i]));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("coercivity predicate verdicts") {
  CHECK(paneitz_coercivity_sufficient(0.05, 2.9, 6) == CoercivityVerdict::Coercive);
  CHECK(paneitz_coercivity_sufficient(-1.0, 5.0, 8) == CoercivityVerdict::Inconclusive);
  CHECK(paneitz_coercivity_sufficient(1.0, 1.0, 5) == CoercivityVerdict::InvalidInput);
  CHECK(to_string(CoercivityVerdict::Coercive) == "coercive");
}

TEST_CASE("product check across Einstein factor dimensions") {
  SolitonSolution sol = run_soliton_pipeline({});
  for (int n2 = 4; n2 <= 12; ++n2) {
    const ProductCheckResult res = product_check(n2, sol);
    CHECK(res.inequality_holds);
    CHECK(res.positive);
    CHECK(res.min_bound > 0.0);
    CHECK(res.min_Q >= res.min_bound - 1e-9);
  }
  // N = 8: 8^2 * 4^2 = 1024 > 48 * 7 = 336; R_g2 = b(4)/(2 b(8)) (4 - 2c).
  const ProductCheckResult r8 = product_check(4, sol);
  CHECK(r8.inequality_lhs == doctest::Approx(1024.0));
  CHECK(r8.inequality_rhs == doctest::Approx(336.0));
  const DimConstants d8 = dim_constants(8);
  const double expect =
      (1.0 / 6.0) / (2.0 * d8.b) * (4.0 - 2.0 * sol.c);
  CHECK(r8.R_g2 == doctest::Approx(expect).epsilon(1e-12));
  // Coercivity of the product follows from the two positivity facts.
  CHECK(paneitz_coercivity_sufficient(r8.min_Q, 4.0 + 2.0 * sol.c + r8.R_g2, r8.N) ==
        CoercivityVerdict::Coercive);
  CHECK_THROWS_AS(product_check(3, sol), ConfigError);
}

TEST_CASE("yamabe coefficients") {
  const Profile s33 = make_sphere(3, 3);
  const OperatorCoefficients oc = yamabe_coefficients(s33);
  CHECK(oc.m == 1);
  CHECK(oc.a[1] == doctest::Approx(1.0));
  // (N-2)/(4(N-1)) R = (3/16) * 20 = 15/4 for N = 5.
  CHECK(oc.alpha0(0.7) == doctest::Approx(15.0 / 4.0).epsilon(1e-14));

  SolitonSolution sol = run_soliton_pipeline({});
  const Profile kc = profile_from_soliton(sol);
  const OperatorCoefficients okc = yamabe_coefficients(kc);
  // alpha0 = R/6 > 0 since R >= 4 + 2c > 0
  for (double t : {0.0, 1.0, 2.5, kc.d}) {
    CHECK(okc.alpha0(t) == doctest::Approx(kc.scalar_curvature(t) / 6.0).epsilon(1e-13));
    CHECK(okc.alpha0(t) > 0.0);
  }

  Profile bad = make_sphere(3, 3);
  bad.scalar_curvature.value = -1.0;
  CHECK_THROWS_AS(yamabe_coefficients(bad), ConfigError);
}

TEST_CASE("product-of-factors coefficients expand correctly") {
  const OperatorCoefficients o2 = einstein_gjms_coefficients(2, {1.0, 2.0});
  CHECK(o2.m == 2);
  CHECK(o2.alpha0(0.3) == doctest::Approx(2.0));
  CHECK(o2.a[1] == doctest::Approx(3.0));
  CHECK(o2.a[2] == doctest::Approx(1.0));

  const OperatorCoefficients o1 = einstein_gjms_coefficients(1, {5.0});
  CHECK(o1.alpha0(0.0) == doctest::Approx(5.0));
  CHECK(o1.a[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(einstein_gjms_coefficients(3, {1.0, 1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(einstein_gjms_coefficients(2, {1.0}), ConfigError);
  CHECK_THROWS_AS(einstein_gjms_coefficients(2, {1.0, -2.0}), ConfigError);
}

TEST_CASE("expanded operator equals sequential factor application") {
  // (-L + c1)(-L + c2) w == (L^2 + (c1+c2)(-L) + c1 c2) w on the interior.
  const Profile p = make_sphere(3, 3);
  const Grid g = make_grid(p, 0.4, 2.6, 64);
  std::vector<double> w(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) w[i] = std::sin(1.7 * g.t[i]) + 0.3 * g.t[i];

  const double c1 = 1.3, c2 = 2.1;
  const auto Lw = apply_L(g, w);
  std::vector<double> step1(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) step1[i] = -Lw[i] + c2 * w[i];
  const auto Lstep1 = apply_L(g, step1);
  const auto LLw = apply_L(g, Lw);
  double worst = 0.0;
  for (int i = 2; i + 2 < g.nodes(); ++i) {
    const double sequential = -Lstep1[i] + c1 * step1[i];
    const double expanded = LLw[i] + (c1 + c2) * (-Lw[i]) + c1 * c2 * w[i];
    worst = std::max(worst, std::abs(sequential - expanded));
  }
  CHECK(worst < 1e-8);
}
