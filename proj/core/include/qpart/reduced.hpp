#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qpart/banded.hpp"
#include "qpart/curvature.hpp"
#include "qpart/geometry.hpp"

namespace qpart {

/// Uniform grid on a subinterval [a, b] of the orbit space with the
/// weight beta and mean curvature h sampled at nodes (and beta at cell
/// midpoints for the gradient quadrature).
struct Grid {
  double a = 0.0, b = 0.0;
  int n = 0;          // cells; nodes = n + 1
  double dx = 0.0;
  double d_total = 0.0;
  int dim_N = 0;

  std::vector<double> t;
  std::vector<double> beta;
  std::vector<double> beta_mid;
  std::vector<double> h;       // 0 sentinel at a singular endpoint
  std::vector<double> qw;      // integration weights (Simpson when n even)
  std::vector<double> mw;      // weak-form mass weights (trapezoid; pairs
                               // consistently with the midpoint stiffness)

  bool singular_left = false, singular_right = false;
  double kappa_left = 1.0, kappa_right = 1.0;  // regular-limit factor of L

  int nodes() const { return n + 1; }
};

/// Samples a profile on [a, b] with n cells (n >= 16). Endpoints touching
/// 0 or d are flagged singular; there the natural (weighted no-flux)
/// condition applies and the regular limit of L is kappa * w''.
Grid make_grid(const Profile& profile, double a, double b, int n);

/// Grid from explicit weight/drift callables (test problems, beta == 1).
Grid make_grid_from(double a, double b, int n,
                    const std::function<double(double)>& beta_fn,
                    const std::function<double(double)>& h_fn, int dim_N = 4);

/// Integral of values * beta over the grid using the grid's node weights
/// (Simpson when the cell count is even, trapezoid otherwise).
double quad_beta(const Grid& grid, std::span<const double> values);

/// L w = w'' + h w' at the nodes; at singular endpoints the regular limit
/// kappa * w'' with an even-reflection ghost, one-sided stencils at
/// ordinary endpoints.
std::vector<double> apply_L(const Grid& grid, std::span<const double> w);

enum class Boundary { Dirichlet, Natural };

/// Weighted weak form of alpha0 + sum a_i (-L)^i over the free nodes,
/// assembled as a symmetric banded matrix:
///   m = 1:  a1 int w'v' beta + int alpha0 w v beta,
///   m = 2:  adds a2 int (Lw)(Lv) beta.
/// Dirichlet ends clamp w = 0 (and w' = 0 through the endpoint L-row when
/// m = 2); natural ends carry no constraint, the flux dying with beta.
struct DiscreteOperator {
  Grid grid;
  int m = 1;
  std::vector<double> a;        // a[1..m]
  std::vector<double> alpha0;   // node samples
  Boundary left = Boundary::Dirichlet, right = Boundary::Dirichlet;

  std::vector<int> free_nodes;  // node index per DOF
  bool tied_left = false, tied_right = false;  // m = 2 singular ends: the
                               // endpoint value follows the regular branch
  SymBanded A;                  // quadratic form over free DOFs
  SymBanded chol;               // Cholesky factor of A, kept for solves
  double smallest_rayleigh = 0.0;  // vs the beta mass, from assembly

  int dofs() const { return static_cast<int>(free_nodes.size()); }

  /// Solves A x = rhs over the free DOFs with the stored factor.
  std::vector<double> solve(std::vector<double> rhs) const;

  /// Gathers the free entries of a full-node vector.
  std::vector<double> restrict_free(std::span<const double> w_full) const;
  /// Scatters a free vector into a full-node vector (clamped nodes 0).
  std::vector<double> expand_full(std::span<const double> w_free) const;
};

DiscreteOperator assemble(const Grid& grid, const OperatorCoefficients& coeffs,
                          Boundary left, Boundary right);

/// Boundary tags implied by the grid: natural at singular ends, Dirichlet
/// otherwise.
DiscreteOperator assemble(const Grid& grid, const OperatorCoefficients& coeffs);

/// sqrt(w^T A w) over the free nodes of a full-node vector.
double norm_beta_a(const DiscreteOperator& op, std::span<const double> w_full);

/// P w = alpha0 w + sum a_i (-L)^i w by difference stencils, full nodes.
std::vector<double> apply_P(const DiscreteOperator& op, std::span<const double> w_full);

/// max over interior nodes (margin m on both sides) of |P w - |w|^{p-2} w|.
double strong_residual(const DiscreteOperator& op, std::span<const double> w_full,
                       double p);

}  // namespace qpart
