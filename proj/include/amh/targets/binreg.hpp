#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "amh/target.hpp"
#include "amh/targets/dataset.hpp"

namespace amh {

enum class Link { logit, probit };

inline std::string to_string(Link link) { return link == Link::logit ? "logit" : "probit"; }

namespace detail {

/// phi(t) / Phi(t) (inverse Mills ratio), stable for all t.
inline double normal_hazard_ratio(double t) {
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  if (t > -8.0) {
    const double cdf = 0.5 * std::erfc(-t / std::numbers::sqrt2);
    return inv_sqrt_2pi * std::exp(-0.5 * t * t) / cdf;
  }
  // Phi(t) / phi(t) = 1 / (s + 1 / (s + 2 / (s + 3 / (s + ...)))) with s = -t.
  const double s = -t;
  double frac = s;
  for (int k = 60; k >= 1; --k) frac = s + k / frac;
  return frac;
}

/// log Phi(t), stable for all t.
inline double log_normal_cdf(double t) {
  constexpr double log_inv_sqrt_2pi = -0.91893853320467274;
  if (t > 0.0) return std::log1p(-0.5 * std::erfc(t / std::numbers::sqrt2));
  if (t > -8.0) return std::log(0.5 * std::erfc(-t / std::numbers::sqrt2));
  return log_inv_sqrt_2pi - 0.5 * t * t - std::log(normal_hazard_ratio(t));
}

inline double log_sigmoid(double t) {
  return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// X^T diag(w) X + I / prior_variance, accumulated row by row.
inline Matrix weighted_gram(const Matrix& x, const Vector& w, double prior_variance) {
  const Eigen::Index d = x.cols();
  Matrix out = Matrix::Identity(d, d) / prior_variance;
  out.noalias() += x.transpose() * w.asDiagonal() * x;
  return out;
}

}  // namespace detail

/**
 * Bayesian binary regression P(y_i = 1) = rho((X beta)_i) with
 * beta ~ N(0, 100 I).
 *
 * For the logit link -H(beta) and the Fisher metric are produced by the same
 * routine from the same weights, so they agree bit for bit.
 */
class BinRegTarget final : public Target {
 public:
  static constexpr double prior_variance = 100.0;

  BinRegTarget(DesignData data, Link link) : data_(std::move(data)), link_(link) {
    if (data_.x.rows() == 0 || data_.x.cols() == 0 || data_.y.size() != data_.x.rows()) {
      throw input_error("BinRegTarget: design and response dimensions disagree");
    }
  }

  std::size_t dim() const override { return data_.d(); }

  TargetEval eval(const Vector& beta) const override {
    check(beta);
    const Vector eta = data_.x * beta;
    const Eigen::Index n = eta.size();
    Vector dl(n);    // d log-lik / d eta
    Vector curv(n);  // -d^2 log-lik / d eta^2
    double loglik = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = eta(i);
      const bool one = data_.y(i) == 1.0;
      if (link_ == Link::logit) {
        const double p = detail::sigmoid(t);
        loglik += one ? detail::log_sigmoid(t) : detail::log_sigmoid(-t);
        dl(i) = (one ? 1.0 : 0.0) - p;
        curv(i) = p * (1.0 - p);
      } else {
        // d/dt log Phi(t) = lambda(t), d^2/dt^2 log Phi(t) = -lambda(t) (t + lambda(t))
        const double s = one ? t : -t;
        const double lam = detail::normal_hazard_ratio(s);
        loglik += detail::log_normal_cdf(s);
        dl(i) = one ? lam : -lam;
        curv(i) = lam * (s + lam);
      }
    }
    TargetEval e;
    e.logk = loglik - beta.squaredNorm() / (2.0 * prior_variance);
    if (!std::isfinite(e.logk)) return TargetEval::invalid(dim());
    e.grad = data_.x.transpose() * dl - beta / prior_variance;
    e.hess = -SymmetricMatrix(detail::weighted_gram(data_.x, curv, prior_variance));
    return e;
  }

  /// X^T Lambda X + I / 100 with Lambda_ii = rho'(eta)^2 / (rho (1 - rho)).
  std::optional<SymmetricMatrix> fisher(const Vector& beta) const override {
    check(beta);
    const Vector eta = data_.x * beta;
    Vector w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const double t = eta(i);
      if (link_ == Link::logit) {
        const double p = detail::sigmoid(t);
        w(i) = p * (1.0 - p);
      } else {
        // phi^2 / (Phi (1 - Phi)) = lambda(t) * lambda(-t)
        w(i) = detail::normal_hazard_ratio(t) * detail::normal_hazard_ratio(-t);
      }
    }
    return SymmetricMatrix(detail::weighted_gram(data_.x, w, prior_variance));
  }

  std::string name() const override { return "binreg_" + to_string(link_); }

  Link link() const noexcept { return link_; }
  const DesignData& data() const noexcept { return data_; }

 private:
  void check(const Vector& beta) const {
    if (beta.size() != data_.x.cols()) throw input_error("BinRegTarget: dimension mismatch");
  }

  DesignData data_;
  Link link_;
};

inline TargetEval eval_binreg(const Vector& beta, const DesignData& data, Link link) {
  return BinRegTarget(data, link).eval(beta);
}

inline SymmetricMatrix fisher_binreg(const Vector& beta, const DesignData& data, Link link) {
  return *BinRegTarget(data, link).fisher(beta);
}

}  // namespace amh
