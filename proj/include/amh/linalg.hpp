#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "amh/error.hpp"

namespace amh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * Dense symmetric real matrix with finite entries.
 *
 * Construction checks that the input is symmetric up to a small relative
 * tolerance (to absorb round-off in assembled Hessians) and then copies the
 * lower triangle onto the upper one, so the stored matrix is exactly
 * symmetric afterwards.
 */
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix a, double rel_tol = 1e-10) : a_(std::move(a)) {
    if (a_.rows() == 0 || a_.rows() != a_.cols()) {
      throw input_error("SymmetricMatrix: matrix must be square with positive dimension");
    }
    if (!a_.allFinite()) {
      throw input_error("SymmetricMatrix: non-finite entry");
    }
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    const Eigen::Index n = a_.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j + 1; i < n; ++i) {
        if (std::abs(a_(i, j) - a_(j, i)) > rel_tol * scale) {
          throw input_error("SymmetricMatrix: matrix is not symmetric");
        }
        a_(j, i) = a_(i, j);
      }
    }
  }

  static SymmetricMatrix identity(std::size_t dim) {
    return SymmetricMatrix(Matrix::Identity(dim, dim));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(a_.rows()); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }
  const Matrix& matrix() const noexcept { return a_; }

  SymmetricMatrix operator-() const { return SymmetricMatrix(-a_, 0.0); }

  /// Largest absolute diagonal entry.
  double max_abs_diagonal() const { return a_.diagonal().cwiseAbs().maxCoeff(); }

  /// Largest absolute strictly-off-diagonal entry; 0 for a 1x1 matrix.
  double max_abs_off_diagonal() const {
    double xi = 0.0;
    for (Eigen::Index j = 0; j < a_.cols(); ++j) {
      for (Eigen::Index i = j + 1; i < a_.rows(); ++i) {
        xi = std::max(xi, std::abs(a_(i, j)));
      }
    }
    return xi;
  }

 private:
  Matrix a_;
};

/// Solves L x = b by forward substitution; only the lower triangle of `lower` is read.
inline Vector solve_lower(const Matrix& lower, const Vector& b) {
  const Eigen::Index n = lower.rows();
  if (lower.cols() != n || b.size() != n) {
    throw input_error("solve_lower: dimension mismatch");
  }
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double diag = lower(i, i);
    if (diag == 0.0) {
      throw numerical_error("solve_lower: zero diagonal entry (singular factor)");
    }
    double s = b(i);
    for (Eigen::Index k = 0; k < i; ++k) {
      s -= lower(i, k) * x(k);
    }
    x(i) = s / diag;
  }
  return x;
}

/// Solves L^T x = b by back substitution, reading only the lower triangle of `lower`.
inline Vector solve_upper_transpose(const Matrix& lower, const Vector& b) {
  const Eigen::Index n = lower.rows();
  if (lower.cols() != n || b.size() != n) {
    throw input_error("solve_upper_transpose: dimension mismatch");
  }
  Vector x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const double diag = lower(i, i);
    if (diag == 0.0) {
      throw numerical_error("solve_upper_transpose: zero diagonal entry (singular factor)");
    }
    double s = b(i);
    for (Eigen::Index k = i + 1; k < n; ++k) {
      s -= lower(k, i) * x(k);
    }
    x(i) = s / diag;
  }
  return x;
}

}  // namespace amh
