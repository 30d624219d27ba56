#pragma once

#include <algorithm>
#include <cmath>

#include "amh/error.hpp"
#include "amh/linalg.hpp"

namespace amh {

/**
 * Output of the modified Cholesky factorization A + diag(J) = L L^T.
 *
 * `unit_lower` has a unit diagonal and `lower = unit_lower * diag(D)^{1/2}`.
 * `perturbation` holds J, the amount added to each diagonal entry of A.
 */
struct FactorizationResult {
  Matrix unit_lower;
  Vector d;
  Matrix lower;
  Vector perturbation;
  double logdet = 0.0;  // sum_j log D[j] = log det(A + diag(J))

  std::size_t dim() const noexcept { return static_cast<std::size_t>(d.size()); }
  Matrix reconstruct() const { return lower * lower.transpose(); }
};

/**
 * Gill-Murray-Wright modified Cholesky factorization of a symmetric, possibly
 * indefinite matrix.
 *
 * Square-root-free left-looking LDL^T where each pivot is raised to
 *   D[j] = max(delta, |D[j]|, theta_j^2 / phi^2)
 * with phi^2 = max(nu, xi / sqrt(d^2 - 1), u) and delta = u * max(nu, xi, 1),
 * nu / xi the largest absolute diagonal / off-diagonal entries. This bounds
 * every |L[i,j]| by phi and every L[j,j]^2 from below by delta. For d = 1 the
 * off-diagonal term is absent and contributes 0 to phi^2.
 *
 * @param a Symmetric input.
 * @param u Scale parameter, 0 < u < 1.
 */
inline FactorizationResult gmw_factorize(const SymmetricMatrix& a, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw input_error("gmw_factorize: scale u must lie in (0, 1)");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(a.dim());
  const Matrix& A = a.matrix();

  const double nu = a.max_abs_diagonal();
  const double xi = a.max_abs_off_diagonal();
  const double off_term = n > 1 ? xi / std::sqrt(static_cast<double>(n) * n - 1.0) : 0.0;
  const double phi2 = std::max({nu, off_term, u});
  const double delta = u * std::max({nu, xi, 1.0});

  Matrix lt = Matrix::Identity(n, n);
  Vector d = A.diagonal();
  Vector j_diag = Vector::Zero(n);

  for (Eigen::Index j = 0; j < n; ++j) {
    // Row j of lt still holds D[k] * Ltilde[j,k]; finish it.
    for (Eigen::Index k = 0; k < j; ++k) {
      lt(j, k) /= d(k);
    }
    // Column j below the diagonal, scaled by the (not yet chosen) D[j].
    double theta = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double c = A(i, j);
      for (Eigen::Index k = 0; k < j; ++k) {
        c -= lt(i, k) * lt(j, k);
      }
      lt(i, j) = c;
      theta = std::max(theta, std::abs(c));
    }
    const double before = d(j);
    d(j) = std::max({delta, std::abs(before), theta * theta / phi2});
    j_diag(j) = d(j) - before;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      d(i) -= lt(i, j) * lt(i, j) / d(j);
    }
  }

  FactorizationResult out;
  out.lower = lt;
  out.logdet = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double root = std::sqrt(d(j));
    out.lower.col(j) *= root;
    out.logdet += std::log(d(j));
  }
  out.unit_lower = std::move(lt);
  out.d = std::move(d);
  out.perturbation = std::move(j_diag);
  return out;
}

}  // namespace amh
