#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "amh/error.hpp"
#include "amh/linalg.hpp"
#include "amh/metric.hpp"
#include "amh/rng.hpp"
#include "amh/target.hpp"

namespace amh {

/**
 * Tuning of the adaptive step-size sampler.
 *
 * gamma is the largest accepted |energy error| of the trial step, beta_ls the
 * threshold above which the step is cut by the fixed factor rho_ls instead of
 * by the cubic model. Every step size lies in [eps_min, eps_bar].
 */
struct SamplerConfig {
  double gamma = 1.0;
  double beta_ls = 10.0;
  double rho_ls = 0.5;
  double eps_bar = 1.0;
  double u = 0.001;
  int max_ls_iters = 25;
  double eps_min = 1e-6;
  MetricKind metric = MetricKind::mchol;

  double fixed_eps = 1.0;  // fixed-step sMMALA
  double hmc_eps = 0.1;    // HMC nominal step, jittered +-10%
  int hmc_steps = 10;

  void validate() const {
    if (!(gamma > 0.0 && gamma < beta_ls)) throw input_error("SamplerConfig: need 0 < gamma < beta_ls");
    if (!(rho_ls > 0.0 && rho_ls < 1.0)) throw input_error("SamplerConfig: need 0 < rho_ls < 1");
    if (!(eps_min > 0.0 && eps_min < eps_bar) || !std::isfinite(eps_bar)) {
      throw input_error("SamplerConfig: need 0 < eps_min < eps_bar < inf");
    }
    if (!(u > 0.0 && u < 1.0)) throw input_error("SamplerConfig: need 0 < u < 1");
    if (max_ls_iters < 1) throw input_error("SamplerConfig: max_ls_iters must be positive");
    if (!(fixed_eps > 0.0) || !(hmc_eps > 0.0) || hmc_steps < 1) {
      throw input_error("SamplerConfig: fixed_eps, hmc_eps and hmc_steps must be positive");
    }
  }
};

/// Current position, auxiliary standard-normal vector w, and the cached
/// evaluation and metric at the position.
struct ChainState {
  Vector x;
  Vector w;
  TargetEval eval;
  MetricTensor metric;
};

struct ProposalRecord {
  Vector x_star;
  double eps_f = 0.0;
  double eps_b = 0.0;
  double alpha = 0.0;
  bool accepted = false;
  double delta_f = 0.0;
  double delta_b = 0.0;
  int ls_iters_f = 0;
  int ls_iters_b = 0;
  long grad_evals = 0;
};

/// x* = x + (eps^2 / 2) G^{-1} g + eps L^{-T} w.
inline Vector smmala_propose(const Vector& x, const Vector& w, double eps, const TargetEval& eval,
                             const MetricTensor& metric) {
  if (x.size() != w.size() || x.size() != eval.grad.size() ||
      x.size() != metric.lower.rows()) {
    throw input_error("smmala_propose: dimension mismatch");
  }
  if (!(eps > 0.0)) throw input_error("smmala_propose: step size must be positive");
  return x + (0.5 * eps * eps) * metric.solve(eval.grad) +
         eps * solve_upper_transpose(metric.lower, w);
}

/// Proposal mean x + (eps^2 / 2) G^{-1} g.
inline Vector smmala_mean(const Vector& x, double eps, const TargetEval& eval,
                          const MetricTensor& metric) {
  return x + (0.5 * eps * eps) * metric.solve(eval.grad);
}

/**
 * Energy error of one leapfrog step of the dummy Hamiltonian with fixed mass
 * G(from), starting at momentum L(from) w and landing on `to`:
 *   -log k(from) + log k(to) - (eps/2) w^T r - (eps^2/8) r^T r,
 *   r = L(from)^{-1} (g(from) + g(to)).
 * Returns -inf when the landing point cannot be evaluated.
 */
inline double energy_between(double eps, const TargetEval& from, const MetricTensor& metric_from,
                             const Vector& w, const TargetEval& to) {
  if (!to.valid || !from.valid) return -std::numeric_limits<double>::infinity();
  const Vector r = solve_lower(metric_from.lower, from.grad + to.grad);
  const double d = -from.logk + to.logk - 0.5 * eps * w.dot(r) - 0.125 * eps * eps * r.squaredNorm();
  return std::isnan(d) ? -std::numeric_limits<double>::infinity() : d;
}

struct EnergyTrial {
  double delta = 0.0;
  Vector x_star;
  TargetEval eval_star;
};

/// Trial step from (x, w) with step size eps and its energy error.
inline EnergyTrial energy_error(double eps, const Vector& x, const Vector& w,
                                const TargetEval& eval_x, const MetricTensor& metric_x,
                                const Target& target) {
  EnergyTrial t;
  t.x_star = smmala_propose(x, w, eps, eval_x, metric_x);
  t.eval_star = t.x_star.allFinite() ? target.eval(t.x_star) : TargetEval::invalid(target.dim());
  t.delta = energy_between(eps, eval_x, metric_x, w, t.eval_star);
  return t;
}

/**
 * Next trial step of the backtracking search after observing |Delta| at eps.
 * Returns eps itself when |Delta| < gamma (accept), rho * eps when
 * |Delta| > beta, and otherwise 0.95 times the root of the cubic model
 * (e / eps)^3 |Delta| = gamma. Non-finite |Delta| counts as above beta.
 */
inline double next_trial_step(double eps, double abs_delta, const SamplerConfig& cfg) {
  if (!(abs_delta <= cfg.beta_ls)) return cfg.rho_ls * eps;
  if (abs_delta < cfg.gamma) return eps;
  return 0.95 * std::cbrt(cfg.gamma / abs_delta) * eps;
}

struct StepSelection {
  double eps = 0.0;
  int ls_iters = 0;
  double last_delta = 0.0;
};

/**
 * Energy-error backtracking line search for eps(x, w).
 *
 * Starts at eps_bar and shrinks until |Delta| < gamma. The search stops early
 * after max_ls_iters trials or when the next trial would fall below eps_min,
 * returning max(next trial, eps_min). The result is a deterministic function
 * of (x, w) in [eps_min, eps_bar].
 */
inline StepSelection adaptive_step(const Vector& x, const Vector& w, const TargetEval& eval,
                                   const MetricTensor& metric, const Target& target,
                                   const SamplerConfig& cfg) {
  StepSelection sel;
  double eps = cfg.eps_bar;
  for (int s = 1;; ++s) {
    const EnergyTrial trial = energy_error(eps, x, w, eval, metric, target);
    sel.ls_iters = s;
    sel.last_delta = trial.delta;
    const double abs_delta = std::abs(trial.delta);
    const double next = next_trial_step(eps, abs_delta, cfg);
    if (abs_delta < cfg.gamma) {
      sel.eps = eps;
      return sel;
    }
    if (s >= cfg.max_ls_iters || next < cfg.eps_min) {
      sel.eps = std::max(next, cfg.eps_min);
      return sel;
    }
    eps = next;
  }
}

/// log N(x_to | x_from + (eps^2/2) G^{-1} g, eps^2 G^{-1}) at the `from` point.
inline double smmala_logq(const Vector& x_to, const Vector& x_from, double eps,
                          const TargetEval& eval_from, const MetricTensor& metric_from) {
  const double d = static_cast<double>(x_to.size());
  const Vector diff = x_to - smmala_mean(x_from, eps, eval_from, metric_from);
  const Vector scaled = metric_from.lower.transpose() * diff;
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - d * std::log(eps) +
         0.5 * metric_from.logdet - scaled.squaredNorm() / (2.0 * eps * eps);
}

namespace detail {

/// Shared accept/reject tail of the sMMALA updates. Draws one uniform.
inline std::pair<ChainState, ProposalRecord> finish_smmala(
    const ChainState& state, const Target& target, const SamplerConfig& cfg, ChainRng& rng,
    ProposalRecord rec, const Vector& z, TargetEval eval_star,
    const std::function<StepSelection(const Vector&, const TargetEval&, const MetricTensor&)>&
        backward_step) {
  const double unif = rng.uniform();
  rec.alpha = 0.0;
  rec.accepted = false;
  rec.delta_f = energy_between(rec.eps_f, state.eval, state.metric, z, eval_star);
  if (!eval_star.valid) {
    rec.eps_b = rec.eps_f;
    rec.delta_b = std::numeric_limits<double>::quiet_NaN();
    return {state, std::move(rec)};
  }
  MetricTensor metric_star = build_metric(cfg.metric, target, rec.x_star, eval_star, cfg.u);
  const StepSelection back = backward_step(rec.x_star, eval_star, metric_star);
  rec.eps_b = back.eps;
  rec.ls_iters_b = back.ls_iters;
  rec.grad_evals += back.ls_iters;

  const double log_num = eval_star.logk +
                         smmala_logq(state.x, rec.x_star, rec.eps_b, eval_star, metric_star);
  const double log_den = state.eval.logk +
                         smmala_logq(rec.x_star, state.x, rec.eps_f, state.eval, state.metric);
  const double log_alpha = log_num - log_den;
  if (!std::isnan(log_alpha)) {
    rec.alpha = log_alpha >= 0.0 ? 1.0 : std::clamp(std::exp(log_alpha), 0.0, 1.0);
  }

  // Backward diagnostic: the momentum s that carries x* back to x_t.
  const Vector s = metric_star.lower.transpose() *
                   (state.x - smmala_mean(rec.x_star, rec.eps_b, eval_star, metric_star)) /
                   rec.eps_b;
  rec.delta_b = energy_between(rec.eps_b, eval_star, metric_star, s, state.eval);

  if (unif < rec.alpha) {
    rec.accepted = true;
    ChainState next{rec.x_star, state.w, std::move(eval_star), std::move(metric_star)};
    return {std::move(next), std::move(rec)};
  }
  return {state, std::move(rec)};
}

}  // namespace detail

/**
 * One Metropolis-within-Gibbs update of (x, w).
 *
 * 1. eps_f = eps(x_t, w_t) by line search.
 * 2. x* = x_t + (eps_f^2/2) G^{-1}(x_t) g(x_t) + eps_f L^{-T}(x_t) z, z fresh N(0, I).
 * 3. eps_b = eps(x*, w_t), the same w_t.
 * 4. Metropolis-Hastings accept with the forward/backward Gaussian densities.
 * 5. w_{t+1} ~ N(0, I).
 *
 * Random draws, in order: z (d normals), one uniform, w_{t+1} (d normals).
 */
inline std::pair<ChainState, ProposalRecord> mwg_step(const ChainState& state, const Target& target,
                                                      const SamplerConfig& cfg, ChainRng& rng) {
  const std::size_t d = static_cast<std::size_t>(state.x.size());
  ProposalRecord rec;
  const StepSelection fwd =
      adaptive_step(state.x, state.w, state.eval, state.metric, target, cfg);
  rec.eps_f = fwd.eps;
  rec.ls_iters_f = fwd.ls_iters;
  rec.grad_evals = fwd.ls_iters;

  const Vector z = rng.normal_vector(d);
  rec.x_star = smmala_propose(state.x, z, rec.eps_f, state.eval, state.metric);
  TargetEval eval_star =
      rec.x_star.allFinite() ? target.eval(rec.x_star) : TargetEval::invalid(d);
  rec.grad_evals += 1;

  const Vector& w = state.w;
  auto result = detail::finish_smmala(
      state, target, cfg, rng, std::move(rec), z, std::move(eval_star),
      [&](const Vector& xs, const TargetEval& es, const MetricTensor& ms) {
        return adaptive_step(xs, w, es, ms, target, cfg);
      });
  result.first.w = rng.normal_vector(d);
  return result;
}

/// Standard sMMALA update with eps_f = eps_b = eps. Draws z then one uniform; w is untouched.
inline std::pair<ChainState, ProposalRecord> fixed_step_smmala_step(const ChainState& state,
                                                                    double eps,
                                                                    const Target& target,
                                                                    const SamplerConfig& cfg,
                                                                    ChainRng& rng) {
  if (!(eps > 0.0)) throw input_error("fixed_step_smmala_step: step size must be positive");
  const std::size_t d = static_cast<std::size_t>(state.x.size());
  ProposalRecord rec;
  rec.eps_f = eps;
  const Vector z = rng.normal_vector(d);
  rec.x_star = smmala_propose(state.x, z, eps, state.eval, state.metric);
  TargetEval eval_star =
      rec.x_star.allFinite() ? target.eval(rec.x_star) : TargetEval::invalid(d);
  rec.grad_evals = 1;
  return detail::finish_smmala(state, target, cfg, rng, std::move(rec), z, std::move(eval_star),
                               [eps](const Vector&, const TargetEval&, const MetricTensor&) {
                                 return StepSelection{eps, 0, 0.0};
                               });
}

/// Evaluates the target and metric at x and draws the initial w.
inline ChainState initial_state(const Vector& x, const Target& target, const SamplerConfig& cfg,
                                ChainRng& rng) {
  if (x.size() != static_cast<Eigen::Index>(target.dim())) {
    throw input_error("initial point has the wrong dimension");
  }
  TargetEval eval = target.eval(x);
  if (!eval.valid) throw input_error("initial point is outside the support of the target");
  MetricTensor metric = build_metric(cfg.metric, target, x, eval, cfg.u);
  Vector w = rng.normal_vector(target.dim());
  return {x, std::move(w), std::move(eval), std::move(metric)};
}

}  // namespace amh
