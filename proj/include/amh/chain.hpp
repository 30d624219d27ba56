#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amh/error.hpp"
#include "amh/hmc.hpp"
#include "amh/kernel.hpp"

namespace amh {

enum class KernelKind { amh_mala, amh_mala_eig, fixed_smmala, adaptive_smmala_fisher, hmc };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::amh_mala: return "amh_mala";
    case KernelKind::amh_mala_eig: return "amh_mala_eig";
    case KernelKind::fixed_smmala: return "fixed_smmala";
    case KernelKind::adaptive_smmala_fisher: return "adaptive_smmala_fisher";
    case KernelKind::hmc: return "hmc";
  }
  return "?";
}

inline std::optional<KernelKind> parse_kernel_kind(const std::string& s) {
  for (auto k : {KernelKind::amh_mala, KernelKind::amh_mala_eig, KernelKind::fixed_smmala,
                 KernelKind::adaptive_smmala_fisher, KernelKind::hmc}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// Metric used by each sMMALA kernel; fixed_smmala keeps the configured one.
inline MetricKind kernel_metric(KernelKind kind, MetricKind configured) {
  switch (kind) {
    case KernelKind::amh_mala: return MetricKind::mchol;
    case KernelKind::amh_mala_eig: return MetricKind::eig;
    case KernelKind::adaptive_smmala_fisher: return MetricKind::fisher;
    case KernelKind::hmc: return MetricKind::identity;
    case KernelKind::fixed_smmala: return configured;
  }
  return configured;
}

struct TraceRow {
  Vector x;  // state after the transition
  ProposalRecord record;
};

struct Trace {
  std::vector<TraceRow> rows;  // post burn-in only
  std::uint64_t seed = 0;
  SamplerConfig config;
  KernelKind kind = KernelKind::amh_mala;
  std::size_t n_iters = 0;
  std::size_t n_burn = 0;
  long burn_grad_evals = 0;
  long grad_evals = 0;  // post burn-in
  double seconds = 0.0; // post burn-in wall clock

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t dim() const noexcept { return rows.empty() ? 0 : static_cast<std::size_t>(rows[0].x.size()); }

  /// Coordinate `j` across all retained iterations.
  std::vector<double> coordinate(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.x(static_cast<Eigen::Index>(j)));
    return out;
  }
};

/**
 * Runs n_burn + n_iters transitions of the chosen kernel from `init` and keeps
 * the last n_iters. The whole run is a deterministic function of the seed.
 * Failures inside the loop are rethrown as chain_error with the 1-based
 * iteration index.
 */
inline Trace run_chain(const Target& target, KernelKind kind, std::size_t n_iters,
                       std::size_t n_burn, std::uint64_t seed, const Vector& init,
                       SamplerConfig cfg = {}) {
  cfg.metric = kernel_metric(kind, cfg.metric);
  cfg.validate();
  Trace trace;
  trace.seed = seed;
  trace.config = cfg;
  trace.kind = kind;
  trace.n_iters = n_iters;
  trace.n_burn = n_burn;
  if (n_iters == 0) return trace;
  trace.rows.reserve(n_iters);

  ChainRng rng(seed);
  ChainState state = initial_state(init, target, cfg, rng);
  using clock = std::chrono::steady_clock;
  auto start = clock::now();

  const std::size_t total = n_burn + n_iters;
  for (std::size_t it = 0; it < total; ++it) {
    if (it == n_burn) start = clock::now();
    ProposalRecord rec;
    try {
      switch (kind) {
        case KernelKind::amh_mala:
        case KernelKind::amh_mala_eig:
        case KernelKind::adaptive_smmala_fisher: {
          auto [next, r] = mwg_step(state, target, cfg, rng);
          state = std::move(next);
          rec = std::move(r);
          break;
        }
        case KernelKind::fixed_smmala: {
          auto [next, r] = fixed_step_smmala_step(state, cfg.fixed_eps, target, cfg, rng);
          state = std::move(next);
          rec = std::move(r);
          break;
        }
        case KernelKind::hmc: {
          HmcResult h = hmc_step(state.x, state.eval, cfg.hmc_eps, cfg.hmc_steps, target, rng);
          rec.x_star = h.x;
          rec.eps_f = rec.eps_b = h.eps;
          rec.alpha = h.alpha;
          rec.accepted = h.accepted;
          rec.delta_f = h.delta_h;
          rec.delta_b = -h.delta_h;
          rec.grad_evals = cfg.hmc_steps;
          state.x = std::move(h.x);
          state.eval = std::move(h.eval);
          break;
        }
      }
    } catch (const std::exception& e) {
      throw chain_error(e.what(), it + 1);
    }
    if (it < n_burn) {
      trace.burn_grad_evals += rec.grad_evals;
    } else {
      trace.grad_evals += rec.grad_evals;
      trace.rows.push_back({state.x, std::move(rec)});
    }
  }
  trace.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return trace;
}

}  // namespace amh
