#include "qpart/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "qpart/errors.hpp"

namespace qpart {

DimConstants dim_constants(int N) {
  if (N < 4) throw ConfigError("dim_constants: N must be >= 4");
  DimConstants dc;
  dc.N = N;
  const double n = N;
  dc.a = 1.0 / (2.0 * (n - 1.0));
  dc.b = (n * n * n - 4.0 * n * n + 16.0 * n - 16.0) /
         (8.0 * (n - 1.0) * (n - 1.0) * (n - 2.0) * (n - 2.0));
  dc.c = 2.0 / ((n - 2.0) * (n - 2.0));
  return dc;
}

double soliton_q(int N, double R, double ric_sq, double ric_ff) {
  const DimConstants dc = dim_constants(N);
  return (2.0 * dc.a - dc.c) * ric_sq + dc.b * R * R - 2.0 * dc.a * R -
         2.0 * dc.a * ric_ff;
}

double q_general(int N, double R, double lap_R, double ric_sq) {
  const DimConstants dc = dim_constants(N);
  return -dc.a * lap_R + dc.b * R * R - dc.c * ric_sq;
}

CoercivityVerdict paneitz_coercivity_sufficient(double q_min, double r_min, int N) {
  if (N < 6) return CoercivityVerdict::InvalidInput;
  if (q_min > 0.0 && r_min > 0.0) return CoercivityVerdict::Coercive;
  return CoercivityVerdict::Inconclusive;
}

std::string to_string(CoercivityVerdict v) {
  switch (v) {
    case CoercivityVerdict::Coercive: return "coercive";
    case CoercivityVerdict::Inconclusive: return "inconclusive";
    case CoercivityVerdict::InvalidInput: return "invalid-input";
  }
  return "?";
}

ProductCheckResult product_check(int n2, const SolitonSolution& koiso) {
  if (n2 < 4) throw ConfigError("product_check: n2 must be >= 4");
  if (!koiso.profiles_filled || koiso.Q.empty())
    throw ConfigError("product_check: soliton profiles/Q not filled");

  ProductCheckResult res;
  res.N = 4 + n2;
  const DimConstants d4 = dim_constants(4);
  const DimConstants dN = dim_constants(res.N);

  const double nn = res.N;
  res.inequality_lhs = nn * nn * (nn - 4.0) * (nn - 4.0);
  res.inequality_rhs = 48.0 * (nn - 1.0);
  res.inequality_holds = res.inequality_lhs > res.inequality_rhs;
  if (!res.inequality_holds)
    throw NumericalError("product_check: polynomial inequality fails for N=" +
                         std::to_string(res.N));

  const double max_R1 = *std::max_element(koiso.R.begin(), koiso.R.end());
  res.R_g2 = d4.b / (2.0 * dN.b) * max_R1;
  const double ric_sq2 = res.R_g2 * res.R_g2 / n2;

  double min_q = 1e300, min_bound = 1e300;
  for (std::size_t i = 0; i < koiso.t_grid.size(); ++i) {
    const double R1 = koiso.R[i];
    const double ric1 = koiso.ricci_sq[i];
    const double ric_ff = koiso.potential_fp[i] * koiso.potential_fp[i] * koiso.Ric11[i];
    // Laplacian of R on a shrinking soliton: 2R - 2|Ric|^2 + 2 Ric(grad f, grad f).
    const double lap_R1 = 2.0 * R1 - 2.0 * ric1 + 2.0 * ric_ff;
    const double Rg = R1 + res.R_g2;
    const double q = q_general(res.N, Rg, lap_R1, ric1 + ric_sq2);
    // Pointwise bound from the proof chain: Q_{g1} plus the cross terms.
    const double bound = koiso.Q[i] - d4.b * R1 * R1 + 2.0 * dN.b * R1 * res.R_g2 +
                         dN.b * R1 * R1 + (dN.b - dN.c / n2) * res.R_g2 * res.R_g2;
    min_q = std::min(min_q, q);
    min_bound = std::min(min_bound, bound);
    if (q < bound - 1e-10)
      throw NumericalError("product_check: pointwise chain violated");
  }
  res.min_Q = min_q;
  res.min_bound = min_bound;
  res.positive = min_bound > 0.0 && min_q > 0.0;
  return res;
}

OperatorCoefficients yamabe_coefficients(const Profile& profile) {
  const int N = profile.dim_N;
  if (N < 3) throw ConfigError("yamabe_coefficients: need N >= 3");
  // Positivity sweep of the scalar curvature.
  const int probes = 512;
  for (int k = 0; k <= probes; ++k) {
    const double t = profile.d * k / probes;
    if (!(profile.scalar_curvature(t) > 0.0))
      throw ConfigError("yamabe_coefficients: scalar curvature not positive at t=" +
                        std::to_string(t));
  }
  OperatorCoefficients oc;
  oc.m = 1;
  oc.a = {0.0, 1.0};
  const double factor = (N - 2.0) / (4.0 * (N - 1.0));
  const ScalarCurvature sc = profile.scalar_curvature;
  oc.alpha0 = [factor, sc](double t) { return factor * sc(t); };
  oc.label = "yamabe:" + profile.name;
  return oc;
}

OperatorCoefficients einstein_gjms_coefficients(int m,
                                                const std::vector<double>& cs) {
  if (m != 1 && m != 2)
    throw ConfigError("einstein_gjms_coefficients: m must be 1 or 2");
  if (static_cast<int>(cs.size()) != m)
    throw ConfigError("einstein_gjms_coefficients: need exactly m factor constants");
  for (double c : cs)
    if (!(c > 0.0))
      throw ConfigError("einstein_gjms_coefficients: factor constants must be positive");

  OperatorCoefficients oc;
  oc.m = m;
  double a0;
  if (m == 1) {
    a0 = cs[0];
    oc.a = {0.0, 1.0};
    oc.label = "einstein:m=1,c1=" + std::to_string(cs[0]);
  } else {
    a0 = cs[0] * cs[1];
    oc.a = {0.0, cs[0] + cs[1], 1.0};
    oc.label = "einstein:m=2,c1=" + std::to_string(cs[0]) +
               ",c2=" + std::to_string(cs[1]);
  }
  oc.alpha0 = [a0](double) { return a0; };
  return oc;
}

}  // namespace qpart
