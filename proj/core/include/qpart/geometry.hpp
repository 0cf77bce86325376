#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qpart/numerics.hpp"
#include "qpart/soliton.hpp"

namespace qpart {

enum class WarpForm { CosHalf, SinHalf, Sin, Cos, SinCos, Sampled };

/// One warping factor f_j of a diagonal cohomogeneity-one metric
/// dt^2 + sum_j f_j(t)^2 g_j, together with the dimension it multiplies.
struct Warp {
  WarpForm form = WarpForm::Sin;
  double scale = 1.0;   // analytic prefactor
  int multiplicity = 1;
  HermiteCurve curve;   // used when form == Sampled

  double value(double t) const;
  double deriv(double t) const;
};

struct ScalarCurvature {
  bool constant = true;
  double value = 0.0;
  HermiteCurve curve;

  double operator()(double t) const;
};

/// Geometry of a cohomogeneity-one manifold reduced to its orbit space
/// [0, d]: warping factors, orbit-volume weight beta = prod f_j^{d_j} and
/// mean curvature h = beta'/beta of the principal orbits.
/// Immutable after construction; safe to share across threads.
struct Profile {
  std::string name;
  int dim_N = 0;
  double d = 0.0;
  std::vector<Warp> warps;
  std::array<int, 2> singular_dims{0, 0};       // dims of the orbits at t=0, t=d
  std::array<std::string, 3> orbit_labels{};    // principal, left, right
  ScalarCurvature scalar_curvature;

  double beta(double t) const;
  double mean_curvature(double t) const;        // valid on the open interval

  /// Sum of multiplicities of warps vanishing at the given end; the
  /// regular limit of the reduced Laplacian at that end is
  /// (1 + this) * w''.
  int vanishing_multiplicity(bool right_end) const;
};

/// Round sphere S^{n1+n2-1} under the block-rotation action with orbit
/// space [0, pi] and warps cos(t/2), sin(t/2).
Profile make_sphere(int n1, int n2);

/// Complex projective space (complex dimension n_cplx >= 3), orbit space
/// [0, pi/2]; warps sin(t) and sqrt((2N-2)/N) sin(t)cos(t).
Profile make_cpn(int n_cplx);

/// Quaternionic projective space (quaternionic dimension n_quat >= 2),
/// orbit space [0, pi/2]; warps sin(t)cos(t) and cos(t).
Profile make_hpn(int n_quat);

/// Four-dimensional profile with warps (-f2 f2', 1) and (f2, 2) built
/// from a solved soliton trajectory; scalar curvature comes with it.
Profile profile_from_soliton(const SolitonSolution& sol);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double worst = 0.0;      // worst violation magnitude (0 when clean)
  double location = 0.0;   // t where it occurred, when meaningful
  std::string detail;
};

struct ValidationReport {
  bool pass = false;
  double max_h_beta_deviation = 0.0;
  std::vector<ValidationCheck> checks;
};

/// Checks the profile invariants on a sample grid: multiplicity sum,
/// positivity of beta, endpoint structure of the warps, h = beta'/beta
/// against five-point finite differences, and the endpoint asymptotics
/// of t*h(t).
ValidationReport validate(const Profile& profile, int samples);

std::string profile_to_json(const Profile& profile, int indent = 2);
Profile profile_from_json(const std::string& text);

/// Parses catalog names: "sphere:n1,n2", "cpn:n", "hpn:n", "koiso-cao".
/// The soliton profile is solved on demand with the given step.
Profile profile_by_name(const std::string& name, double soliton_step = 1e-3);

/// Names and short descriptions of the built-in families.
std::vector<std::pair<std::string, std::string>> catalog();

}  // namespace qpart
