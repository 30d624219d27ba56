#pragma once

#include <cmath>
#include <string>

#include "amh/target.hpp"

namespace amh {

/**
 * Scalar Student-t kernel, log k(x) = -((nu + 1) / 2) log(1 + x^2 / nu).
 *
 * The log-density has inflection points at |x| = sqrt(nu), where the Hessian
 * vanishes.
 */
class StudentTTarget final : public Target {
 public:
  explicit StudentTTarget(double nu) : nu_(nu) {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw input_error("StudentTTarget: degrees of freedom must be positive");
    }
  }

  std::size_t dim() const override { return 1; }

  TargetEval eval(const Vector& x) const override {
    if (x.size() != 1) throw input_error("StudentTTarget: expected a scalar position");
    const double v = x(0);
    const double s = nu_ + v * v;
    TargetEval e;
    e.logk = -0.5 * (nu_ + 1.0) * std::log1p(v * v / nu_);
    e.grad = Vector::Constant(1, -(nu_ + 1.0) * v / s);
    e.hess = SymmetricMatrix(Matrix::Constant(1, 1, -(nu_ + 1.0) * (nu_ - v * v) / (s * s)));
    return e;
  }

  /// Fisher information of the location parameter, (nu + 1) / (nu + 3).
  std::optional<SymmetricMatrix> fisher(const Vector&) const override {
    return SymmetricMatrix(Matrix::Constant(1, 1, (nu_ + 1.0) / (nu_ + 3.0)));
  }

  std::string name() const override { return "student_t"; }

  double nu() const noexcept { return nu_; }

 private:
  double nu_;
};

inline TargetEval eval_student_t(double nu, double x) {
  return StudentTTarget(nu).eval(Vector::Constant(1, x));
}

}  // namespace amh
