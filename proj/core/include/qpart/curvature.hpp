#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qpart/geometry.hpp"
#include "qpart/soliton.hpp"

namespace qpart {

/// Dimensional constants of the fourth-order Q-curvature formula
/// Q = -a Lap(R) + b R^2 - c |Ric|^2 in dimension N.
struct DimConstants {
  int N = 0;
  double a = 0.0;  // 1 / (2(N-1))
  double b = 0.0;  // (N^3 - 4N^2 + 16N - 16) / (8 (N-1)^2 (N-2)^2)
  double c = 0.0;  // 2 / (N-2)^2
};

DimConstants dim_constants(int N);

/// Q-curvature of a shrinking soliton (mu = 1) from pointwise data:
/// (2a - c) |Ric|^2 + b R^2 - 2a R - 2a Ric(grad f, grad f).
double soliton_q(int N, double R, double ric_sq, double ric_ff);

/// General pointwise formula -a Lap(R) + b R^2 - c |Ric|^2.
double q_general(int N, double R, double lap_R, double ric_sq);

enum class CoercivityVerdict { Coercive, Inconclusive, InvalidInput };

/// Sufficient condition for coercivity of the fourth-order operator in
/// dimension N >= 6: positive Q and positive scalar curvature.
/// Returns InvalidInput for N < 6; Inconclusive when the sufficient
/// condition does not apply (it is not necessary).
CoercivityVerdict paneitz_coercivity_sufficient(double q_min, double r_min, int N);

std::string to_string(CoercivityVerdict v);

struct ProductCheckResult {
  int N = 0;                 // 4 + n2
  double R_g2 = 0.0;         // scalar curvature chosen for the second factor
  double inequality_lhs = 0.0;  // N^2 (N-4)^2
  double inequality_rhs = 0.0;  // 48 (N-1)
  bool inequality_holds = false;
  double min_Q = 0.0;        // min over the trajectory of the product Q
  double min_bound = 0.0;    // min of the pointwise lower bound
  bool positive = false;
};

/// Q-curvature positivity of the product of the soliton with an Einstein
/// factor of dimension n2 >= 4, with the second factor rescaled to
/// R_{g2} = b(4) / (2 b(N)) * max R_{g1}. Evaluates the pointwise lower
/// bound over the soliton trajectory as well as the product Q itself.
ProductCheckResult product_check(int n2, const SolitonSolution& koiso);

/// Zero-order coefficient plus constants of the interval operator
/// alpha0 + sum_{i=1..m} a_i (-L)^i.
struct OperatorCoefficients {
  int m = 1;
  std::function<double(double)> alpha0;  // positive on [0, d]
  std::vector<double> a;                 // a[0] unused; a[1..m]
  std::string label;                     // cache key / provenance tag
};

/// Second-order conformal operator: m = 1, a1 = 1,
/// alpha0(t) = (N-2) / (4(N-1)) * R(t). Rejects profiles whose scalar
/// curvature is not positive everywhere.
OperatorCoefficients yamabe_coefficients(const Profile& profile);

/// Product of shifted Laplacians prod_i (-L + c_i) expanded into
/// sum-of-powers form; m in {1, 2} and all c_i > 0.
OperatorCoefficients einstein_gjms_coefficients(int m,
                                                const std::vector<double>& factor_constants);

}  // namespace qpart
