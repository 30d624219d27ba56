#pragma once

#include <cmath>
#include <string>

#include "amh/error.hpp"
#include "amh/linalg.hpp"
#include "amh/mcholesky.hpp"
#include "amh/target.hpp"

namespace amh {

enum class MetricKind { mchol, eig, fisher, identity };

inline std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::mchol: return "mchol";
    case MetricKind::eig: return "eig";
    case MetricKind::fisher: return "fisher";
    case MetricKind::identity: return "identity";
  }
  return "?";
}

/**
 * Position-specific metric G = L L^T, held only through its lower-triangular
 * factor. Samplers use G exclusively through solves with L and L^T.
 */
struct MetricTensor {
  Matrix lower;
  double logdet = 0.0;  // log det G = 2 sum log L[i,i]
  MetricKind kind = MetricKind::mchol;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(lower.rows()); }

  Matrix reconstruct() const { return lower * lower.transpose(); }

  /// G^{-1} v via two triangular solves.
  Vector solve(const Vector& v) const { return solve_upper_transpose(lower, solve_lower(lower, v)); }
};

namespace detail {

inline double factor_logdet(const Matrix& lower) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lower.rows(); ++i) s += std::log(lower(i, i));
  return 2.0 * s;
}

inline Matrix cholesky_or_throw(const Matrix& m, const char* who) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw input_error(std::string(who) + ": matrix is not positive definite");
  }
  Matrix lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0) || !std::isfinite(lower(i, i))) {
      throw input_error(std::string(who) + ": matrix is not positive definite");
    }
  }
  return lower;
}

}  // namespace detail

/// Modified-Cholesky metric: GMW factorization of -H.
inline MetricTensor metric_mchol(const SymmetricMatrix& hess, double u) {
  auto f = gmw_factorize(-hess, u);
  return {std::move(f.lower), f.logdet, MetricKind::mchol};
}

/// Eigenvalue-floored metric: eigenvectors of -H, eigenvalues max(|lambda|, floor).
inline MetricTensor metric_eig(const SymmetricMatrix& hess, double floor) {
  if (!(floor > 0.0)) throw input_error("metric_eig: floor must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> es(-hess.matrix());
  if (es.info() != Eigen::Success) {
    throw numerical_error("metric_eig: eigendecomposition failed");
  }
  const Vector lam = es.eigenvalues().cwiseAbs().cwiseMax(floor);
  Matrix g = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  g = 0.5 * (g + g.transpose());
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) {
    throw numerical_error("metric_eig: reconstructed metric lost positive definiteness");
  }
  Matrix lower = llt.matrixL();
  const double logdet = detail::factor_logdet(lower);
  return {std::move(lower), logdet, MetricKind::eig};
}

/// Fixed SPD metric, e.g. an identity mass matrix or a closed-form Fisher matrix.
inline MetricTensor metric_fixed(const SymmetricMatrix& m, MetricKind kind = MetricKind::identity) {
  Matrix lower = detail::cholesky_or_throw(m.matrix(), "metric_fixed");
  const double logdet = detail::factor_logdet(lower);
  return {std::move(lower), logdet, kind};
}

/**
 * Builds the metric of the requested kind at a point whose target evaluation
 * is already known.
 *
 * The Fisher metric goes through the same GMW routine as the Hessian metric.
 * On an SPD input GMW adds no perturbation, and when -H and the Fisher matrix
 * coincide bit for bit (logit regression) the two samplers then coincide too.
 */
inline MetricTensor build_metric(MetricKind kind, const Target& target, const Vector& x,
                                 const TargetEval& eval, double u) {
  switch (kind) {
    case MetricKind::mchol:
      return metric_mchol(eval.hess, u);
    case MetricKind::eig:
      return metric_eig(eval.hess, u);
    case MetricKind::fisher: {
      const auto f = target.fisher(x);
      if (!f) throw input_error("target '" + target.name() + "' has no Fisher metric");
      auto fac = gmw_factorize(*f, u);
      return {std::move(fac.lower), fac.logdet, MetricKind::fisher};
    }
    case MetricKind::identity: {
      const auto n = static_cast<Eigen::Index>(target.dim());
      return {Matrix::Identity(n, n), 0.0, MetricKind::identity};
    }
  }
  throw input_error("unknown metric kind");
}

}  // namespace amh
