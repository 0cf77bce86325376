#include "qpart/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpart/errors.hpp"
#include "qpart/numerics.hpp"

namespace qpart {

namespace {

Grid make_grid_impl(double a, double b, int n, double d_total, int dim_N,
                    const std::function<double(double)>& beta_fn,
                    const std::function<double(double)>& h_fn,
                    bool singular_left, bool singular_right,
                    double kappa_left, double kappa_right) {
  if (!(a >= 0.0 && a < b && b <= d_total + 1e-12))
    throw ConfigError("make_grid: need 0 <= a < b <= d");
  if (n < 16) throw ConfigError("make_grid: n must be >= 16");
  if (b - a < 10.0 * std::numeric_limits<double>::epsilon() * d_total)
    throw ConfigError("make_grid: interval is degenerate");

  Grid g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.dx = (b - a) / n;
  g.d_total = d_total;
  g.dim_N = dim_N;
  g.singular_left = singular_left;
  g.singular_right = singular_right;
  g.kappa_left = kappa_left;
  g.kappa_right = kappa_right;

  g.t.resize(n + 1);
  g.beta.resize(n + 1);
  g.h.resize(n + 1);
  g.beta_mid.resize(n);
  for (int i = 0; i <= n; ++i) {
    const double t = i == n ? b : a + i * g.dx;
    g.t[i] = t;
    const bool at_singular = (i == 0 && singular_left) || (i == n && singular_right);
    g.beta[i] = at_singular ? 0.0 : beta_fn(t);  // weight vanishes at the orbit
    g.h[i] = at_singular ? 0.0 : h_fn(t);
  }
  for (int i = 0; i < n; ++i) g.beta_mid[i] = beta_fn(a + (i + 0.5) * g.dx);
  g.qw = quadrature_weights(g.dx, n);
  g.mw.assign(n + 1, g.dx);
  g.mw.front() = 0.5 * g.dx;
  g.mw.back() = 0.5 * g.dx;
  return g;
}

}  // namespace

Grid make_grid(const Profile& profile, double a, double b, int n) {
  const double tol = 1e-12 * std::max(1.0, profile.d);
  const bool singular_left = a <= tol;
  const bool singular_right = b >= profile.d - tol;
  const double kl = 1.0 + profile.vanishing_multiplicity(false);
  const double kr = 1.0 + profile.vanishing_multiplicity(true);
  return make_grid_impl(
      a, b, n, profile.d, profile.dim_N,
      [&profile](double t) { return profile.beta(t); },
      [&profile](double t) { return profile.mean_curvature(t); },
      singular_left, singular_right, singular_left ? kl : 1.0,
      singular_right ? kr : 1.0);
}

Grid make_grid_from(double a, double b, int n,
                    const std::function<double(double)>& beta_fn,
                    const std::function<double(double)>& h_fn, int dim_N) {
  return make_grid_impl(a, b, n, b, dim_N, beta_fn, h_fn, false, false, 1.0, 1.0);
}

double quad_beta(const Grid& grid, std::span<const double> values) {
  if (static_cast<int>(values.size()) != grid.nodes())
    throw ConfigError("quad_beta: values must be sampled on the grid nodes");
  double s = 0.0;
  for (int i = 0; i <= grid.n; ++i) s += grid.qw[i] * grid.beta[i] * values[i];
  return s;
}

std::vector<double> apply_L(const Grid& grid, std::span<const double> w) {
  const int n = grid.n;
  if (static_cast<int>(w.size()) != n + 1)
    throw ConfigError("apply_L: w must be sampled on the grid nodes");
  std::vector<double> out(n + 1, 0.0);
  const double idx2 = 1.0 / (grid.dx * grid.dx);
  const double idx = 1.0 / (2.0 * grid.dx);
  for (int i = 1; i < n; ++i)
    out[i] = (w[i - 1] - 2.0 * w[i] + w[i + 1]) * idx2 +
             grid.h[i] * (w[i + 1] - w[i - 1]) * idx;
  if (grid.singular_left) {
    out[0] = grid.kappa_left * 2.0 * (w[1] - w[0]) * idx2;
  } else {
    // one-sided second-order approximations
    const double wpp = (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) * idx2;
    const double wp = (-3.0 * w[0] + 4.0 * w[1] - w[2]) * idx;
    out[0] = wpp + grid.h[0] * wp;
  }
  if (grid.singular_right) {
    out[n] = grid.kappa_right * 2.0 * (w[n - 1] - w[n]) * idx2;
  } else {
    const double wpp = (2.0 * w[n] - 5.0 * w[n - 1] + 4.0 * w[n - 2] - w[n - 3]) * idx2;
    const double wp = (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) * idx;
    out[n] = wpp + grid.h[n] * wp;
  }
  return out;
}

namespace {

// Row of the discrete L hitting node j, expressed over node indices;
// at Dirichlet ends (m = 2) the clamped node is dropped and the ghost
// reflection w(-1) = w(1) encodes w' = 0.
struct LRow {
  int idx[3];
  double coef[3];
  int count = 0;
};

LRow l_row(const Grid& g, int j, Boundary left, Boundary right) {
  const int n = g.n;
  const double idx2 = 1.0 / (g.dx * g.dx);
  const double idx = 1.0 / (2.0 * g.dx);
  LRow r;
  if (j == 0) {
    if (g.singular_left) {
      r.idx[0] = 0;
      r.coef[0] = -g.kappa_left * 2.0 * idx2;
      r.idx[1] = 1;
      r.coef[1] = g.kappa_left * 2.0 * idx2;
      r.count = 2;
    } else if (left == Boundary::Dirichlet) {
      // w(0) = 0, w'(0) = 0: L w(0) ~ 2 w(1) / dx^2
      r.idx[0] = 1;
      r.coef[0] = 2.0 * idx2;
      r.count = 1;
    } else {
      r.count = 0;  // interior natural end without weight decay: skip row
    }
    return r;
  }
  if (j == n) {
    if (g.singular_right) {
      r.idx[0] = n;
      r.coef[0] = -g.kappa_right * 2.0 * idx2;
      r.idx[1] = n - 1;
      r.coef[1] = g.kappa_right * 2.0 * idx2;
      r.count = 2;
    } else if (right == Boundary::Dirichlet) {
      r.idx[0] = n - 1;
      r.coef[0] = 2.0 * idx2;
      r.count = 1;
    } else {
      r.count = 0;
    }
    return r;
  }
  r.idx[0] = j - 1;
  r.coef[0] = idx2 - g.h[j] * idx;
  r.idx[1] = j;
  r.coef[1] = -2.0 * idx2;
  r.idx[2] = j + 1;
  r.coef[2] = idx2 + g.h[j] * idx;
  r.count = 3;
  return r;
}

}  // namespace

DiscreteOperator assemble(const Grid& grid, const OperatorCoefficients& coeffs,
                          Boundary left, Boundary right) {
  if (coeffs.m != 1 && coeffs.m != 2)
    throw ConfigError("assemble: m must be 1 or 2");
  if (static_cast<int>(coeffs.a.size()) != coeffs.m + 1)
    throw ConfigError("assemble: coefficient array must have m+1 entries");
  if (!(coeffs.a[coeffs.m] > 0.0))
    throw ConfigError("assemble: leading coefficient a_m must be positive");
  for (int i = 1; i < coeffs.m; ++i)
    if (coeffs.a[i] < 0.0)
      throw ConfigError("assemble: intermediate coefficients must be >= 0");
  if (grid.singular_left && left == Boundary::Dirichlet)
    throw ConfigError("assemble: Dirichlet condition at a singular end");
  if (grid.singular_right && right == Boundary::Dirichlet)
    throw ConfigError("assemble: Dirichlet condition at a singular end");

  DiscreteOperator op;
  op.grid = grid;
  op.m = coeffs.m;
  op.a = coeffs.a;
  op.left = left;
  op.right = right;

  const int n = grid.n;
  op.alpha0.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    op.alpha0[i] = coeffs.alpha0(grid.t[i]);
    if (!(op.alpha0[i] > 0.0))
      throw ConfigError("assemble: alpha0 must be positive on the interval");
  }

  // At a singular end the fourth-order discretization admits a spurious
  // boundary layer along the singular homogeneous branch (finite on the
  // grid, infinite in the continuum norm). Tie the endpoint value to the
  // regular branch there: w0 = (4 w1 - w2) / 3, i.e. w'(0) = 0 at O(h^2).
  op.tied_left = coeffs.m == 2 && grid.singular_left;
  op.tied_right = coeffs.m == 2 && grid.singular_right;

  std::vector<int> node_to_free(n + 1, -1);
  for (int i = 0; i <= n; ++i) {
    if (i == 0 && (left == Boundary::Dirichlet || op.tied_left)) continue;
    if (i == n && (right == Boundary::Dirichlet || op.tied_right)) continue;
    node_to_free[i] = static_cast<int>(op.free_nodes.size());
    op.free_nodes.push_back(i);
  }
  const int F = op.dofs();
  op.A = SymBanded(F, op.m == 2 ? 2 : 1);

  // Small linear combination of free DOFs; node values, differences and
  // stencil rows all flatten into this before entering the form.
  struct Terms {
    int idx[6];
    double c[6];
    int count = 0;
    void add(int i, double v) {
      if (i < 0 || v == 0.0) return;
      for (int k = 0; k < count; ++k)
        if (idx[k] == i) {
          c[k] += v;
          return;
        }
      idx[count] = i;
      c[count] = v;
      ++count;
    }
  };
  auto node_terms = [&](int node, double scale, Terms& out) {
    if (node == 0 && op.tied_left) {
      out.add(node_to_free[1], scale * 4.0 / 3.0);
      out.add(node_to_free[2], scale * -1.0 / 3.0);
      return;
    }
    if (node == n && op.tied_right) {
      out.add(node_to_free[n - 1], scale * 4.0 / 3.0);
      out.add(node_to_free[n - 2], scale * -1.0 / 3.0);
      return;
    }
    out.add(node_to_free[node], scale);  // clamped nodes map to -1 and drop
  };
  auto add_square = [&](const Terms& t, double w) {
    for (int s = 0; s < t.count; ++s) {
      op.A.add(t.idx[s], t.idx[s], w * t.c[s] * t.c[s]);
      for (int r = s + 1; r < t.count; ++r)
        op.A.add(t.idx[s], t.idx[r], w * t.c[s] * t.c[r]);
    }
  };

  // Mass: int alpha0 w v beta (lumped, consistent with the P1 stiffness).
  for (int i = 0; i <= n; ++i) {
    Terms t;
    node_terms(i, 1.0, t);
    add_square(t, grid.mw[i] * grid.beta[i] * op.alpha0[i]);
  }
  // Gradient: a1 int w'v' beta with midpoint weights.
  const double a1 = coeffs.a[1];
  if (a1 > 0.0) {
    for (int i = 0; i < n; ++i) {
      Terms t;
      node_terms(i + 1, 1.0, t);
      node_terms(i, -1.0, t);
      add_square(t, a1 * grid.beta_mid[i] / grid.dx);
    }
  }
  // Bending: a2 int (Lw)(Lv) beta.
  if (coeffs.m == 2) {
    const double a2 = coeffs.a[2];
    for (int j = 0; j <= n; ++j) {
      const double wgt = a2 * grid.mw[j] * grid.beta[j];
      if (wgt == 0.0) continue;
      const LRow row = l_row(grid, j, left, right);
      Terms t;
      for (int s = 0; s < row.count; ++s) node_terms(row.idx[s], row.coef[s], t);
      add_square(t, wgt);
    }
  }

  double pivot = 0.0;
  if (!op.A.cholesky(&op.chol, &pivot))
    throw NumericalError("assemble: weak form not positive definite (pivot " +
                         std::to_string(pivot) + ")");
  std::vector<double> mass(F);
  for (int f = 0; f < F; ++f) {
    const int i = op.free_nodes[f];
    mass[f] = grid.mw[i] * grid.beta[i];
  }
  op.smallest_rayleigh = op.A.smallest_pencil_eigenvalue(mass);
  if (!(op.smallest_rayleigh > 0.0))
    throw NumericalError("assemble: nonpositive Rayleigh quotient estimate");
  return op;
}

DiscreteOperator assemble(const Grid& grid, const OperatorCoefficients& coeffs) {
  return assemble(grid, coeffs,
                  grid.singular_left ? Boundary::Natural : Boundary::Dirichlet,
                  grid.singular_right ? Boundary::Natural : Boundary::Dirichlet);
}

std::vector<double> DiscreteOperator::solve(std::vector<double> rhs) const {
  if (static_cast<int>(rhs.size()) != dofs())
    throw ConfigError("DiscreteOperator::solve: size mismatch");
  chol.cholesky_solve(rhs);
  return rhs;
}

std::vector<double> DiscreteOperator::restrict_free(std::span<const double> w_full) const {
  std::vector<double> w(free_nodes.size());
  for (std::size_t f = 0; f < free_nodes.size(); ++f) w[f] = w_full[free_nodes[f]];
  return w;
}

std::vector<double> DiscreteOperator::expand_full(std::span<const double> w_free) const {
  std::vector<double> w(grid.nodes(), 0.0);
  for (std::size_t f = 0; f < free_nodes.size(); ++f) w[free_nodes[f]] = w_free[f];
  const int n = grid.n;
  if (tied_left) w[0] = (4.0 * w[1] - w[2]) / 3.0;
  if (tied_right) w[n] = (4.0 * w[n - 1] - w[n - 2]) / 3.0;
  return w;
}

double norm_beta_a(const DiscreteOperator& op, std::span<const double> w_full) {
  if (static_cast<int>(w_full.size()) != op.grid.nodes())
    throw ConfigError("norm_beta_a: vector size mismatch");
  const auto w = op.restrict_free(w_full);
  const double q = op.A.quad_form(w);
  double scale = 0.0;
  for (double v : w) scale += v * v;
  if (q < -1e-10 * std::max(1.0, scale))
    throw NumericalError("norm_beta_a: negative quadratic form (assembly failure)");
  return std::sqrt(std::max(0.0, q));
}

std::vector<double> apply_P(const DiscreteOperator& op, std::span<const double> w_full) {
  const int n = op.grid.n;
  if (static_cast<int>(w_full.size()) != n + 1)
    throw ConfigError("apply_P: vector size mismatch");
  std::vector<double> out(n + 1);
  const std::vector<double> w(w_full.begin(), w_full.end());
  const auto Lw = apply_L(op.grid, w);
  if (op.m == 1) {
    for (int i = 0; i <= n; ++i)
      out[i] = op.alpha0[i] * w[i] - op.a[1] * Lw[i];
  } else {
    const auto LLw = apply_L(op.grid, Lw);
    for (int i = 0; i <= n; ++i)
      out[i] = op.alpha0[i] * w[i] - op.a[1] * Lw[i] + op.a[2] * LLw[i];
  }
  return out;
}

double strong_residual(const DiscreteOperator& op, std::span<const double> w_full,
                       double p) {
  const auto Pw = apply_P(op, w_full);
  const int n = op.grid.n;
  double worst = 0.0;
  for (int i = op.m; i <= n - op.m; ++i) {
    const double wv = w_full[i];
    const double nonlin = std::pow(std::abs(wv), p - 2.0) * wv;
    worst = std::max(worst, std::abs(Pw[i] - nonlin));
  }
  return worst;
}

}  // namespace qpart
