#pragma once

#include <span>
#include <vector>

namespace qpart {

/// Symmetric banded matrix, upper storage: entry(i, i+k) for k = 0..kd.
class SymBanded {
 public:
  SymBanded() = default;
  SymBanded(int n, int kd);

  int size() const { return n_; }
  int bandwidth() const { return kd_; }

  double get(int i, int j) const;
  void add(int i, int j, double v);

  std::vector<double> mul(std::span<const double> x) const;
  double quad_form(std::span<const double> x) const;

  /// Cholesky factorization A = L L^T kept in band storage.
  /// Returns false and sets *bad_pivot when A is not positive definite.
  bool cholesky(SymBanded* factor, double* bad_pivot = nullptr) const;

  /// Solves L L^T x = b given the factor produced by cholesky().
  void cholesky_solve(std::vector<double>& b) const;

  /// Smallest eigenvalue of the pencil A v = lambda M v with M = diag(mass),
  /// by inverse power iteration; requires *this positive definite.
  double smallest_pencil_eigenvalue(std::span<const double> mass,
                                    int iters = 120) const;

 private:
  double& ref(int i, int k) { return d_[static_cast<std::size_t>(k) * n_ + i]; }
  double val(int i, int k) const {
    return d_[static_cast<std::size_t>(k) * n_ + i];
  }

  int n_ = 0, kd_ = 0;
  std::vector<double> d_;
};

}  // namespace qpart
