#include "qpart/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "qpart/errors.hpp"

namespace qpart {

double integrate_uniform_trapezoid(double dx, std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * dx;
}

double integrate_uniform(double dx, std::span<const double> v) {
  const std::size_t m = v.size();
  if (m < 2) return 0.0;
  std::size_t n = m - 1;  // cells
  if (n == 1) return integrate_uniform_trapezoid(dx, v);
  double s = 0.0;
  std::size_t even_cells = n;
  if (n % 2 != 0) {
    if (n < 3) return integrate_uniform_trapezoid(dx, v);
    even_cells = n - 3;  // 3/8 rule for the last three cells
    const std::size_t k = even_cells;
    s += 3.0 * dx / 8.0 * (v[k] + 3.0 * v[k + 1] + 3.0 * v[k + 2] + v[k + 3]);
  }
  for (std::size_t i = 0; i + 2 <= even_cells; i += 2)
    s += dx / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
  return s;
}

std::vector<double> quadrature_weights(double dx, int n) {
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  if (n % 2 == 0 && n >= 2) {
    for (int i = 0; i + 2 <= n; i += 2) {
      w[i] += dx / 3.0;
      w[i + 1] += 4.0 * dx / 3.0;
      w[i + 2] += dx / 3.0;
    }
  } else {
    w.assign(w.size(), dx);
    w.front() = 0.5 * dx;
    w.back() = 0.5 * dx;
  }
  return w;
}

namespace {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

std::vector<double> second_derivative_uniform(double dx,
                                              std::span<const double> v) {
  const std::size_t m = v.size();
  std::vector<double> d2(m, 0.0);
  if (m < 3) return d2;
  const double idx2 = 1.0 / (dx * dx);
  for (std::size_t i = 1; i + 1 < m; ++i)
    d2[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * idx2;
  d2[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3 < m ? 3 : 2]) * idx2;
  d2[m - 1] =
      (2.0 * v[m - 1] - 5.0 * v[m - 2] + 4.0 * v[m - 3] - v[m >= 4 ? m - 4 : m - 3]) * idx2;
  return d2;
}

double fd_derivative_5pt(const std::function<double(double)>& f, double t,
                         double step) {
  return (f(t - 2.0 * step) - 8.0 * f(t - step) + 8.0 * f(t + step) -
          f(t + 2.0 * step)) /
         (12.0 * step);
}

HermiteCurve::HermiteCurve(std::vector<double> t, std::vector<double> v,
                           std::vector<double> dv)
    : t_(std::move(t)), v_(std::move(v)), dv_(std::move(dv)) {
  if (t_.size() < 2 || t_.size() != v_.size() || t_.size() != dv_.size())
    throw ConfigError("HermiteCurve: need matching arrays with >= 2 knots");
  for (std::size_t i = 1; i < t_.size(); ++i)
    if (!(t_[i] > t_[i - 1]))
      throw ConfigError("HermiteCurve: knots must be strictly increasing");
}

std::size_t HermiteCurve::segment(double x) const {
  auto it = std::upper_bound(t_.begin(), t_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - t_.begin());
  if (i == 0) return 0;
  if (i >= t_.size()) return t_.size() - 2;
  return i - 1;
}

double HermiteCurve::value(double x) const {
  const std::size_t i = segment(x);
  const double h = t_[i + 1] - t_[i];
  const double s = std::clamp((x - t_[i]) / h, -0.5, 1.5);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * v_[i] + (s3 - 2 * s2 + s) * h * dv_[i] +
         (-2 * s3 + 3 * s2) * v_[i + 1] + (s3 - s2) * h * dv_[i + 1];
}

double HermiteCurve::deriv(double x) const {
  const std::size_t i = segment(x);
  const double h = t_[i + 1] - t_[i];
  const double s = std::clamp((x - t_[i]) / h, -0.5, 1.5);
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * v_[i] / h + (3 * s2 - 4 * s + 1) * dv_[i] +
          (-6 * s2 + 6 * s) * v_[i + 1] / h + (3 * s2 - 2 * s) * dv_[i + 1]);
}

double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, double tol_x, int max_iter) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol_x; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace qpart
