#include "qpart/banded.hpp"

#include <algorithm>
#include <cmath>

#include "qpart/errors.hpp"

namespace qpart {

SymBanded::SymBanded(int n, int kd)
    : n_(n), kd_(kd), d_(static_cast<std::size_t>(kd + 1) * n, 0.0) {}

double SymBanded::get(int i, int j) const {
  if (i > j) std::swap(i, j);
  const int k = j - i;
  if (k > kd_) return 0.0;
  return val(i, k);
}

void SymBanded::add(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  const int k = j - i;
  if (k > kd_) throw ConfigError("SymBanded::add outside bandwidth");
  ref(i, k) += v;
}

std::vector<double> SymBanded::mul(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double s = val(i, 0) * x[i];
    for (int k = 1; k <= kd_; ++k) {
      if (i + k < n_) s += val(i, k) * x[i + k];
      if (i - k >= 0) s += val(i - k, k) * x[i - k];
    }
    y[i] = s;
  }
  return y;
}

double SymBanded::quad_form(std::span<const double> x) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    s += val(i, 0) * x[i] * x[i];
    for (int k = 1; k <= kd_ && i + k < n_; ++k)
      s += 2.0 * val(i, k) * x[i] * x[i + k];
  }
  return s;
}

bool SymBanded::cholesky(SymBanded* factor, double* bad_pivot) const {
  // Band LL^T; factor stores L^T in the same upper layout, i.e.
  // factor entry (j, j+k) = L(j+k, j).
  SymBanded L(n_, kd_);
  L.d_ = d_;
  for (int j = 0; j < n_; ++j) {
    double diag = L.val(j, 0);
    for (int k = 1; k <= kd_ && j - k >= 0; ++k) {
      const double ljk = L.val(j - k, k);
      diag -= ljk * ljk;
    }
    if (!(diag > 0.0)) {
      if (bad_pivot) *bad_pivot = diag;
      return false;
    }
    const double lj = std::sqrt(diag);
    L.ref(j, 0) = lj;
    for (int i = j + 1; i <= j + kd_ && i < n_; ++i) {
      double s = L.val(j, i - j);
      for (int k = 1; k <= kd_; ++k) {
        const int col = j - k;
        if (col < 0 || i - col > kd_) continue;
        s -= L.val(col, i - col) * L.val(col, k);
      }
      L.ref(j, i - j) = s / lj;
    }
  }
  *factor = std::move(L);
  return true;
}

void SymBanded::cholesky_solve(std::vector<double>& b) const {
  // Forward: L y = b, with L(i, j) = val(j, i - j) for j <= i.
  for (int i = 0; i < n_; ++i) {
    double s = b[i];
    for (int k = 1; k <= kd_ && i - k >= 0; ++k) s -= val(i - k, k) * b[i - k];
    b[i] = s / val(i, 0);
  }
  // Backward: L^T x = y.
  for (int i = n_ - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = 1; k <= kd_ && i + k < n_; ++k) s -= val(i, k) * b[i + k];
    b[i] = s / val(i, 0);
  }
}

double SymBanded::smallest_pencil_eigenvalue(std::span<const double> mass,
                                             int iters) const {
  SymBanded fac;
  double pivot = 0.0;
  if (!cholesky(&fac, &pivot))
    throw NumericalError("smallest_pencil_eigenvalue: matrix not positive definite");
  std::vector<double> x(n_, 1.0);
  for (int i = 0; i < n_; ++i) x[i] = 1.0 + 0.01 * ((i * 2654435761u) % 97);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> mx(n_);
    for (int i = 0; i < n_; ++i) mx[i] = mass[i] * x[i];
    fac.cholesky_solve(mx);
    double nrm = 0.0;
    for (double v : mx) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) break;
    for (double& v : mx) v /= nrm;
    x = std::move(mx);
    double xax = quad_form(x);
    double xmx = 0.0;
    for (int i = 0; i < n_; ++i) xmx += mass[i] * x[i] * x[i];
    if (xmx > 0.0) lambda = xax / xmx;
  }
  return lambda;
}

}  // namespace qpart
