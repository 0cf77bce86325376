#include "qpart/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpart/errors.hpp"
#include "qpart/numerics.hpp"
#include "qpart/ode.hpp"

namespace qpart {

double xi(double x) {
  return std::exp(2.0 * x) * (2.0 - 4.0 * x + 3.0 * x * x) - 2.0 + x * x;
}

double solve_c(double tol) {
  if (!(tol > 0.0)) throw ConfigError("solve_c: tol must be positive");
  double lo = -1.0, hi = -0.5;
  double flo = xi(lo), fhi = xi(hi);
  if (!(flo > 0.0 && fhi < 0.0))
    throw NumericalError("solve_c: bracket [-1,-1/2] does not change sign");
  // xi is strictly decreasing on the bracket.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = xi(mid);
    if (std::abs(fm) < tol && hi - lo < 1e-15) return mid;
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double c = 0.5 * (lo + hi);
  if (std::abs(xi(c)) >= tol)
    throw NumericalError("solve_c: bisection stalled above tolerance");
  return c;
}

namespace {

double f2pp_rhs(double c, double f2, double f2p) {
  return (4.0 - 4.0 * f2p * f2p - f2 * f2 * (1.0 + c * f2p * f2p)) / (2.0 * f2);
}

}  // namespace

SolitonSolution shoot(double c, const ShootOptions& opt) {
  if (!(c > -1.0 && c < -0.5))
    throw ConfigError("shoot: c must lie in (-1, -1/2)");
  if (!(opt.step > 0.0))
    throw ConfigError("shoot: step must be positive");

  OdeRhs rhs = [c](double, const std::vector<double>& y, std::vector<double>& dy) {
    if (y[0] <= 1e-9)
      throw NumericalError("shoot: f2 reached zero (wrong c?)");
    dy[0] = y[1];
    dy[1] = f2pp_rhs(c, y[0], y[1]);
  };

  OdeOptions oo;
  oo.rtol = opt.rtol;
  oo.atol = opt.atol;
  oo.max_step = opt.step;
  oo.t_max = opt.t_max;
  oo.event_direction = +1;       // f2' rises back through zero
  oo.event_min_t = 4.0 * opt.step;
  oo.event_tol = 1e-13;

  OdeEvent ev = [](double, const std::vector<double>& y) { return y[1]; };

  auto traj = integrate_rkf45(rhs, 0.0, {std::sqrt(6.0), 0.0}, oo, ev);
  if (!traj.event_hit)
    throw NumericalError("shoot: f2' did not return to zero before t_max (wrong c?)");

  SolitonSolution sol;
  sol.c = c;
  sol.domain_length = traj.t_event;

  const int n = std::max(4, static_cast<int>(std::ceil(sol.domain_length / opt.step)));
  const double dt = sol.domain_length / n;
  sol.t_grid.resize(n + 1);
  sol.f2.resize(n + 1);
  sol.f2p.resize(n + 1);
  sol.f2pp.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = i == n ? sol.domain_length : i * dt;
    auto y = i == n ? traj.y_event : traj.interpolate(t);
    sol.t_grid[i] = t;
    sol.f2[i] = y[0];
    sol.f2p[i] = y[1];
    sol.f2pp[i] = f2pp_rhs(c, y[0], y[1]);
  }
  return sol;
}

void fill_curvature_profiles(SolitonSolution& sol) {
  const std::size_t m = sol.t_grid.size();
  if (m == 0) throw ConfigError("fill_curvature_profiles: empty solution");
  const double c = sol.c;
  sol.Ric11.resize(m);
  sol.Ric33.resize(m);
  sol.R.resize(m);
  sol.ricci_sq.resize(m);
  sol.potential_f.resize(m);
  sol.potential_fp.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double f2 = sol.f2[i], f2p = sol.f2p[i], f2pp = sol.f2pp[i];
    sol.Ric11[i] = 1.0 + c * (f2 * f2pp + f2p * f2p);
    sol.Ric33[i] = 1.0 + c * f2p * f2p;
    sol.R[i] = 2.0 * sol.Ric11[i] + 2.0 * sol.Ric33[i];
    sol.ricci_sq[i] = 2.0 * sol.Ric11[i] * sol.Ric11[i] +
                      2.0 * sol.Ric33[i] * sol.Ric33[i];
    sol.potential_f[i] = -0.5 * c * f2 * f2;
    sol.potential_fp[i] = -c * f2 * f2p;
  }
  sol.profiles_filled = true;
}

std::vector<double> q_profile(SolitonSolution& sol) {
  if (!sol.profiles_filled)
    throw ConfigError("q_profile: curvature profiles not filled");
  const std::size_t m = sol.t_grid.size();
  sol.Q.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double ric_ff = sol.potential_fp[i] * sol.potential_fp[i] * sol.Ric11[i];
    sol.Q[i] = (sol.R[i] * sol.R[i] - sol.ricci_sq[i] - 2.0 * sol.R[i] -
                2.0 * ric_ff) / 6.0;
  }
  return sol.Q;
}

double total_volume(const SolitonSolution& sol) {
  const std::size_t m = sol.t_grid.size();
  if (m < 2) throw ConfigError("total_volume: empty solution");
  std::vector<double> integrand(m);
  for (std::size_t i = 0; i < m; ++i)
    integrand[i] = -sol.f2[i] * sol.f2[i] * sol.f2[i] * sol.f2p[i];
  const double dt = sol.t_grid[1] - sol.t_grid[0];
  const double pi = std::acos(-1.0);
  return 2.0 * pi * pi * integrate_uniform(dt, integrand);
}

double conservation_residual(const SolitonSolution& sol) {
  const std::size_t m = sol.t_grid.size();
  if (m < 4) throw ConfigError("conservation_residual: trajectory too short");
  const double c = sol.c;
  const double dt = sol.t_grid[1] - sol.t_grid[0];
  // Independent second derivative: central differences of the sampled f2'.
  std::vector<double> f2pp_fd(m);
  for (std::size_t i = 1; i + 1 < m; ++i)
    f2pp_fd[i] = (sol.f2p[i + 1] - sol.f2p[i - 1]) / (2.0 * dt);
  f2pp_fd[0] = (-3.0 * sol.f2p[0] + 4.0 * sol.f2p[1] - sol.f2p[2]) / (2.0 * dt);
  f2pp_fd[m - 1] =
      (3.0 * sol.f2p[m - 1] - 4.0 * sol.f2p[m - 2] + sol.f2p[m - 3]) / (2.0 * dt);

  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double f2 = sol.f2[i], f2p = sol.f2p[i];
    const double f = -0.5 * c * f2 * f2;
    const double fp = -c * f2 * f2p;
    const double R = 4.0 * c * f2p * f2p + 2.0 * c * f2 * f2pp_fd[i] + 4.0;
    const double resid = fp * fp - (2.0 * f - R + 4.0 + 4.0 * c);
    worst = std::max(worst, std::abs(resid));
  }
  return worst;
}

SolitonSolution run_soliton_pipeline(const ShootOptions& opt) {
  const double c = solve_c(1e-13);
  SolitonSolution sol = shoot(c, opt);
  fill_curvature_profiles(sol);
  q_profile(sol);
  return sol;
}

}  // namespace qpart
