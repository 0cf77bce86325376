#pragma once

#include <vector>

namespace qpart {

/// Trajectory of the rotationally invariant shrinking soliton on
/// CP^2 # CP^2-bar (Koiso-Cao metric), sampled on a uniform grid with
/// the left turning point translated to t = 0.
struct SolitonSolution {
  double c = 0.0;             // soliton constant, in (-1, -1/2)
  double domain_length = 0.0; // distance between the two turning points
  std::vector<double> t_grid;
  std::vector<double> f2, f2p, f2pp;

  // Curvature profiles, filled by fill_curvature_profiles().
  std::vector<double> R, Ric11, Ric33, ricci_sq;
  std::vector<double> potential_f, potential_fp;
  std::vector<double> Q;

  bool profiles_filled = false;
};

/// xi(x) = e^{2x} (2 - 4x + 3x^2) - 2 + x^2. Its root in (-1, -1/2)
/// is the soliton constant.
double xi(double x);

/// Root of xi on [-1, -1/2], bracketed bisection to |xi(c)| < tol.
double solve_c(double tol = 1e-13);

struct ShootOptions {
  double step = 1e-3;   // output spacing and max integrator step
  double rtol = 1e-12;
  double atol = 1e-12;
  double t_max = 20.0;  // give up if f2' never returns to zero
};

/// Integrates 2 f2 f2'' + 4 f2'^2 - 4 + f2^2 (1 + c f2'^2) = 0 from
/// f2(0) = sqrt(6), f2'(0) = 0 until f2' returns to zero, locating the
/// event on the dense output.
SolitonSolution shoot(double c, const ShootOptions& opt = {});

/// Fills R11 = 1 + c(f2 f2'' + f2'^2), R33 = 1 + c f2'^2, R = 2R11 + 2R33,
/// |Ric|^2 = 2R11^2 + 2R33^2, the potential f = -c f2^2 / 2 and f' = -c f2 f2'.
void fill_curvature_profiles(SolitonSolution& sol);

/// Q(t) = (R^2 - |Ric|^2 - 2R - 2 f'^2 R11) / 6; also stored in sol.Q.
std::vector<double> q_profile(SolitonSolution& sol);

/// -2 pi^2 * integral of f2^3 f2' over the trajectory.
double total_volume(const SolitonSolution& sol);

/// Max over the grid of |f'^2 - (2f - R + 4 + 4c)| with the second
/// derivative of f2 recomputed by finite differences, so the value
/// measures integration/discretization error rather than the algebraic
/// identity built into the stored samples.
double conservation_residual(const SolitonSolution& sol);

/// solve_c + shoot + curvature profiles + Q in one call.
SolitonSolution run_soliton_pipeline(const ShootOptions& opt = {});

}  // namespace qpart
