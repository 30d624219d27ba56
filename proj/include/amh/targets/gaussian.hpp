#pragma once

#include <string>

#include "amh/target.hpp"

namespace amh {

/// Multivariate normal N(mu, Sigma); the normalizing constant is dropped.
class GaussianTarget final : public Target {
 public:
  GaussianTarget(Vector mu, const Matrix& sigma) : mu_(std::move(mu)) {
    if (sigma.rows() != mu_.size() || sigma.cols() != mu_.size() || mu_.size() == 0) {
      throw input_error("GaussianTarget: dimension mismatch");
    }
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success || !sigma.isApprox(sigma.transpose())) {
      throw input_error("GaussianTarget: covariance is not symmetric positive definite");
    }
    const Matrix precision = llt.solve(Matrix::Identity(sigma.rows(), sigma.cols()));
    precision_ = SymmetricMatrix(0.5 * (precision + precision.transpose()));
    neg_precision_ = -*precision_;
  }

  static GaussianTarget standard(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return GaussianTarget(Vector::Zero(n), Matrix::Identity(n, n));
  }

  std::size_t dim() const override { return static_cast<std::size_t>(mu_.size()); }

  TargetEval eval(const Vector& x) const override {
    if (x.size() != mu_.size()) throw input_error("GaussianTarget: dimension mismatch");
    const Vector diff = x - mu_;
    TargetEval e;
    e.grad = -(precision_->matrix() * diff);
    e.logk = 0.5 * diff.dot(e.grad);
    e.hess = *neg_precision_;
    return e;
  }

  std::optional<SymmetricMatrix> fisher(const Vector&) const override { return precision_; }

  std::string name() const override { return "gaussian"; }

  const Vector& mean() const noexcept { return mu_; }
  const SymmetricMatrix& precision() const { return *precision_; }

 private:
  Vector mu_;
  std::optional<SymmetricMatrix> precision_;
  std::optional<SymmetricMatrix> neg_precision_;
};

inline TargetEval eval_gaussian(const Vector& mu, const Matrix& sigma, const Vector& x) {
  return GaussianTarget(mu, sigma).eval(x);
}

}  // namespace amh
