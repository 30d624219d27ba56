#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "amh/chain.hpp"
#include "amh/error.hpp"
#include "amh/linalg.hpp"

namespace amh {

struct EssEstimate {
  double ess = 0.0;
  double tau = 0.0;        // integrated autocorrelation time, ess = n / tau
  std::size_t lags = 0;    // autocovariance lags used
  bool degenerate = false; // constant series
};

/**
 * Effective sample size by Geyer's initial monotone sequence estimator.
 *
 * Pair sums Gamma_m = c_{2m} + c_{2m+1} of the autocovariances are summed up to
 * the first non-positive one and forced non-increasing by a running minimum;
 * tau = -1 + 2 sum Gamma_m / c_0. tau is floored at 1 / log10(n) so that
 * antithetic series report a finite ESS above n. A constant series yields
 * ESS = n with `degenerate` set.
 */
inline EssEstimate ess_imse(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 10) throw input_error("ess_imse: need at least 10 values");
  double mean = 0.0;
  for (double v : series) {
    if (!std::isfinite(v)) throw input_error("ess_imse: non-finite value");
    mean += v;
  }
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += centered[t] * centered[t + lag];
    return s / static_cast<double>(n);
  };

  EssEstimate out;
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) {
    out.ess = static_cast<double>(n);
    out.tau = 1.0;
    out.degenerate = true;
    return out;
  }
  double sum = 0.0;
  double prev = c0 + autocov(1);
  std::size_t lag = 2;
  if (prev > 0.0) {
    sum = prev;
    while (lag + 1 < n) {
      double pair = autocov(lag) + autocov(lag + 1);
      lag += 2;
      if (!(pair > 0.0)) break;
      pair = std::min(pair, prev);
      sum += pair;
      prev = pair;
    }
  }
  out.lags = lag;
  const double floor = 1.0 / std::log10(static_cast<double>(n));
  out.tau = std::max(-1.0 + 2.0 * sum / c0, floor);
  out.ess = static_cast<double>(n) / out.tau;
  return out;
}

inline EssEstimate ess_imse(const std::vector<double>& series) {
  return ess_imse(std::span<const double>(series));
}

inline double acceptance_rate(const Trace& trace) {
  if (trace.rows.empty()) throw input_error("acceptance_rate: empty trace");
  std::size_t acc = 0;
  for (const auto& r : trace.rows) acc += r.record.accepted ? 1 : 0;
  return static_cast<double>(acc) / static_cast<double>(trace.rows.size());
}

/// Longest run of consecutive identical states that lie in `region`.
inline std::size_t max_stick_run(const std::vector<Vector>& states,
                                 const std::function<bool(const Vector&)>& region) {
  std::size_t best = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!region(states[i])) {
      run = 0;
      continue;
    }
    run = (run > 0 && states[i] == states[i - 1]) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

inline std::size_t max_stick_run(const Trace& trace,
                                 const std::function<bool(const Vector&)>& region) {
  if (trace.rows.empty()) throw input_error("max_stick_run: empty trace");
  std::vector<Vector> states;
  states.reserve(trace.rows.size());
  for (const auto& r : trace.rows) states.push_back(r.x);
  return max_stick_run(states, region);
}

/// Predicate lo < |x_0| < hi on the first coordinate.
inline std::function<bool(const Vector&)> abs_band(double lo, double hi) {
  return [lo, hi](const Vector& x) {
    const double a = std::abs(x(0));
    return a > lo && a < hi;
  };
}

struct ProfileBin {
  double lo = 0.0;
  double hi = 0.0;
  double mean_eps = 0.0;
  std::size_t count = 0;
};

/**
 * Mean forward step size of the transitions started from each bin of the first
 * coordinate. `edges` must be increasing; bin k is [edges[k], edges[k+1]).
 * Empty bins are omitted.
 */
inline std::vector<ProfileBin> step_size_profile(const Trace& trace, const std::vector<double>& edges,
                                                 const Vector* init = nullptr) {
  std::vector<ProfileBin> out;
  if (edges.size() < 2 || trace.rows.empty()) return out;
  std::vector<double> sum(edges.size() - 1, 0.0);
  std::vector<std::size_t> count(edges.size() - 1, 0);
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    // The step of row i was chosen at the state before it.
    const Vector* from = i > 0 ? &trace.rows[i - 1].x : init;
    if (from == nullptr) continue;
    const double v = (*from)(0);
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    if (it == edges.begin() || it == edges.end()) continue;
    const auto k = static_cast<std::size_t>(it - edges.begin() - 1);
    sum[k] += trace.rows[i].record.eps_f;
    ++count[k];
  }
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    if (count[k] == 0) continue;
    out.push_back({edges[k], edges[k + 1], sum[k] / static_cast<double>(count[k]), count[k]});
  }
  return out;
}

/// Pearson correlation; nullopt when either input is constant.
inline std::optional<double> correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 3) {
    throw input_error("correlation: need two sequences of equal length >= 3");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline double min_eigenvalue(const SymmetricMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("min_eigenvalue: eigensolver failed");
  return es.eigenvalues().minCoeff();
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw input_error("median: empty input");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

struct EssReport {
  std::vector<double> ess;
  double min_ess = 0.0;
  double median_ess = 0.0;
  double max_ess = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
  long grad_evals = 0;
  double min_ess_per_second = 0.0;
  double min_ess_per_grad_eval = 0.0;
};

inline EssReport ess_report(const Trace& trace) {
  EssReport r;
  r.iterations = trace.size();
  r.seconds = trace.seconds;
  r.grad_evals = trace.grad_evals;
  if (trace.size() < 10) return r;
  for (std::size_t j = 0; j < trace.dim(); ++j) r.ess.push_back(ess_imse(trace.coordinate(j)).ess);
  r.min_ess = *std::min_element(r.ess.begin(), r.ess.end());
  r.max_ess = *std::max_element(r.ess.begin(), r.ess.end());
  r.median_ess = median(r.ess);
  r.min_ess_per_second = r.seconds > 0.0 ? r.min_ess / r.seconds : 0.0;
  r.min_ess_per_grad_eval =
      r.grad_evals > 0 ? r.min_ess / static_cast<double>(r.grad_evals) : 0.0;
  return r;
}

}  // namespace amh
