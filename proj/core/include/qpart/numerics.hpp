#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qpart {

/// Composite integral of uniformly spaced samples with spacing dx.
/// Uses Simpson's rule when the cell count is even; the tail of an odd
/// cell count is handled with the 3/8 rule, falling back to trapezoid
/// for fewer than three cells.
double integrate_uniform(double dx, std::span<const double> values);

/// Trapezoid rule on the same layout, for convergence comparisons.
double integrate_uniform_trapezoid(double dx, std::span<const double> values);

/// Quadrature weights matching integrate_uniform (Simpson when the cell
/// count n is even, trapezoid otherwise). Returns n + 1 weights.
std::vector<double> quadrature_weights(double dx, int n);

/// Adaptive Simpson quadrature; independent cross-check path for tests
/// and validation reports.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-12, int max_depth = 40);

/// Second derivative of uniform samples by central differences
/// (second order one-sided at the ends).
std::vector<double> second_derivative_uniform(double dx,
                                              std::span<const double> values);

/// Five-point central first-derivative stencil, O(step^4).
double fd_derivative_5pt(const std::function<double(double)>& f, double t,
                         double step);

/// Piecewise-cubic Hermite interpolant on a strictly increasing knot grid;
/// stores values and first derivatives at the knots.
class HermiteCurve {
 public:
  HermiteCurve() = default;
  HermiteCurve(std::vector<double> t, std::vector<double> v,
               std::vector<double> dv);

  double value(double x) const;
  double deriv(double x) const;

  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  const std::vector<double>& derivs() const { return dv_; }
  bool empty() const { return t_.empty(); }

 private:
  std::size_t segment(double x) const;
  std::vector<double> t_, v_, dv_;
};

/// Golden-section minimization of a unimodal function on [lo, hi].
double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, double tol_x, int max_iter = 200);

}  // namespace qpart
