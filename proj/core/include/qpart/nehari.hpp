#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qpart/reduced.hpp"

namespace qpart {

/// Least-energy solution of the reduced problem on one subinterval.
struct IntervalSolution {
  double a = 0.0, b = 0.0;
  std::vector<double> t;
  std::vector<double> w;       // full nodes, clamped entries zero
  double energy = 0.0;         // (1/2 - 1/p) ||w||^2 on the constraint set
  double p = 0.0;
  double residual = 0.0;       // strong residual of the returned profile
  int iterations = 0;
  bool converged = false;
};

/// (1/2 - 1/p); equals m/N at the default exponent p = 2N/(N-2m).
double energy_factor(double p);

/// Default exponent 2N / (N - 2m).
double critical_exponent(int N, int m);

/// Scales w onto the constraint set ||w||^2 = int |w|^p beta:
/// s^{p-2} = ||w||^2 / int |w|^p beta.
std::vector<double> nehari_project(const DiscreteOperator& op,
                                   std::span<const double> w_full, double p);

struct SolveOptions {
  int max_iter = 800;
  double tol = 1e-13;          // relative energy change
  double grad_tol = 1e-7;      // scale-invariant gradient norm
};

/// Minimizes the quotient ||w||^2 / (int |w|^p beta)^{2/p} by descent
/// preconditioned with the assembled operator (normalized inverse
/// iteration with a backtracked mixing step), then scales the minimizer
/// onto the constraint set. Energy is (1/2 - 1/p) ||w||^2 there.
IntervalSolution least_energy(const DiscreteOperator& op, double p,
                              std::optional<std::vector<double>> init = std::nullopt,
                              const SolveOptions& opts = {});

/// least_energy from the default bump plus bumps hugging each endpoint,
/// keeping the lowest-energy converged run. Ground states on wide or
/// singular-end intervals can concentrate near an end, where a centered
/// initialization converges to a higher critical point (for instance the
/// constant branch on a full orbit space).
IntervalSolution least_energy_best(const DiscreteOperator& op, double p,
                                   const SolveOptions& opts = {});

struct OracleSolution {
  double energy = 0.0;
  double slope = 0.0;   // w'(0) of the ground state
  double length = 0.0;
  std::vector<double> t, w;
};

/// Independent path for constant-coefficient problems with beta == 1 and
/// m = 1: shoots -w'' + alpha0 w = |w|^{p-2} w from w(0) = 0 and bisects
/// the initial slope until the first return to zero lands at L.
OracleSolution shooting_oracle(double alpha0_const, double p, double L);

}  // namespace qpart
