#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "amh/target.hpp"
#include "amh/targets/dataset.hpp"
#include "amh/targets/jet.hpp"

namespace amh {

/// Prior hyperparameters: N(0, coef_variance) truncated to the positive axis
/// for alpha0, alpha1, beta; exponential with rate nu_rate truncated to nu > 2.
struct GarchPrior {
  double coef_variance = 1000.0;
  double nu_rate = 0.01;
};

/**
 * Posterior of a GARCH(1,1) model with standardized Student-t innovations in
 * the coordinates (log alpha0, log alpha1, log beta, log(nu - 2)).
 *
 * The log-kernel includes the log-Jacobian of the transform so that the chain
 * targets the stated posterior. Derivatives are exact: the variance recursion
 * is propagated with second-order forward-mode numbers.
 */
class GarchTTarget final : public Target {
 public:
  using J4 = Jet<4>;

  GarchTTarget(ReturnSeries data, GarchPrior prior = {})
      : data_(std::move(data)), prior_(prior) {
    if (data_.size() < 2) throw input_error("GarchTTarget: need at least two observations");
  }

  std::size_t dim() const override { return 4; }

  TargetEval eval(const Vector& theta) const override {
    if (theta.size() != 4) throw input_error("GarchTTarget: expected 4 parameters");
    if (!theta.allFinite()) return TargetEval::invalid(4);
    const J4 total = log_kernel(theta);
    if (!std::isfinite(total.v) || !total.g.allFinite() || !total.h.allFinite()) {
      return TargetEval::invalid(4);
    }
    TargetEval e;
    e.logk = total.v;
    e.grad = total.g;
    e.hess = SymmetricMatrix(total.h, 1e-8);
    return e;
  }

  /// Data log-likelihood alone, without priors or Jacobian.
  double log_likelihood(const Vector& theta) const { return likelihood(vars(theta)).v; }

  std::string name() const override { return "garch_t"; }

  const ReturnSeries& data() const noexcept { return data_; }

 private:
  struct Vars {
    J4 a0, a1, b, nu_shift;  // alpha0, alpha1, beta, nu - 2 on the natural scale
    J4 log_nu_shift;
  };

  static Vars vars(const Vector& theta) {
    Vars v;
    v.a0 = exp(J4::variable(0, theta(0)));
    v.a1 = exp(J4::variable(1, theta(1)));
    v.b = exp(J4::variable(2, theta(2)));
    v.log_nu_shift = J4::variable(3, theta(3));
    v.nu_shift = exp(v.log_nu_shift);
    return v;
  }

  J4 likelihood(const Vars& v) const {
    const J4 nu = v.nu_shift + 2.0;
    const J4 half_nu1 = 0.5 * (nu + 1.0);
    const double t = static_cast<double>(data_.size());
    // Per-observation constant of the standardized t density, summed over T.
    J4 total = t * (lgamma(half_nu1) - lgamma(0.5 * nu) - 0.5 * v.log_nu_shift -
                    0.5 * std::log(std::numbers::pi));
    const J4 inv_nu_shift = reciprocal(v.nu_shift);

    J4 h = v.a0;
    J4 sum_log_h;
    J4 weighted;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double y = data_.values[i];
      if (i > 0) {
        const double prev = data_.values[i - 1];
        h = v.a0 + prev * prev * v.a1 + v.b * h;
      }
      sum_log_h += log(h);
      weighted += log1p((y * y) * (inv_nu_shift * reciprocal(h))) * half_nu1;
    }
    return total - 0.5 * sum_log_h - weighted;
  }

  J4 log_kernel(const Vector& theta) const {
    const Vars v = vars(theta);
    const double c = -0.5 / prior_.coef_variance;
    J4 out = likelihood(v);
    out += c * (v.a0 * v.a0 + v.a1 * v.a1 + v.b * v.b);
    out += -prior_.nu_rate * (v.nu_shift + 2.0);
    // log-Jacobian of the log transforms
    out += J4::variable(0, theta(0)) + J4::variable(1, theta(1)) + J4::variable(2, theta(2)) +
           v.log_nu_shift;
    return out;
  }

  ReturnSeries data_;
  GarchPrior prior_;
};

inline TargetEval eval_garch_t(const Vector& theta, const ReturnSeries& data,
                               const GarchPrior& prior = {}) {
  return GarchTTarget(data, prior).eval(theta);
}

}  // namespace amh
