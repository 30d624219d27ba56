#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "amh/linalg.hpp"

namespace amh {

/**
 * Log-kernel of a target density with its first and second derivatives at one
 * point. When `valid` is false the point lies outside the numerically usable
 * region: `logk` is -infinity and `grad` / `hess` must not be used.
 */
struct TargetEval {
  double logk = 0.0;
  Vector grad;
  SymmetricMatrix hess = SymmetricMatrix::identity(1);
  bool valid = true;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(grad.size()); }

  static TargetEval invalid(std::size_t dim) {
    TargetEval e;
    e.logk = -std::numeric_limits<double>::infinity();
    e.grad = Vector::Zero(static_cast<Eigen::Index>(dim));
    e.hess = -SymmetricMatrix::identity(dim);
    e.valid = false;
    return e;
  }
};

/**
 * A target distribution known up to a normalizing constant.
 *
 * Implementations are immutable after construction and `eval` is safe to call
 * concurrently.
 */
class Target {
 public:
  virtual ~Target() = default;

  virtual std::size_t dim() const = 0;
  virtual TargetEval eval(const Vector& x) const = 0;

  /// Expected negative Hessian metric (Fisher information plus negative prior
  /// Hessian), for targets where it is available in closed form.
  virtual std::optional<SymmetricMatrix> fisher(const Vector&) const { return std::nullopt; }

  virtual std::string name() const = 0;
};

}  // namespace amh
