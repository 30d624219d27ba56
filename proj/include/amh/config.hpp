#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "amh/chain.hpp"
#include "amh/csv.hpp"
#include "amh/error.hpp"
#include "amh/targets/binreg.hpp"
#include "amh/targets/dataset.hpp"

namespace amh {

enum class Experiment { pilot_t4_fixed, pilot_t4_adaptive, gaussian_energy_law, dim_scaling, garch, binreg };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::pilot_t4_fixed: return "pilot-t4-fixed";
    case Experiment::pilot_t4_adaptive: return "pilot-t4-adaptive";
    case Experiment::gaussian_energy_law: return "gaussian-energy-law";
    case Experiment::dim_scaling: return "dim-scaling";
    case Experiment::garch: return "garch";
    case Experiment::binreg: return "binreg";
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(const std::string& s) {
  for (auto e : {Experiment::pilot_t4_fixed, Experiment::pilot_t4_adaptive,
                 Experiment::gaussian_energy_law, Experiment::dim_scaling, Experiment::garch,
                 Experiment::binreg}) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

struct ExperimentConfig {
  Experiment experiment = Experiment::pilot_t4_adaptive;
  KernelKind kernel = KernelKind::amh_mala;
  SamplerConfig sampler;
  std::size_t n_iters = 1000;
  std::size_t n_burn = 0;
  std::uint64_t seed = 0;
  std::vector<double> init;  // empty: experiment default
  std::string data;          // empty: synthetic data
  Link link = Link::logit;
  std::string out = "out";

  double nu = 4.0;                                // pilot target
  std::vector<std::size_t> dims{1, 16, 256};      // dim-scaling, energy law
  std::vector<double> eps_grid{0.5, 1.0};         // energy law
  std::size_t draws = 100000;                     // energy law

  GarchParams sim_garch;                          // synthetic GARCH returns
  std::size_t sim_length = 1000;
  std::uint64_t sim_seed = 1;
  std::size_t sim_n = 200;                        // synthetic regression
  std::vector<double> sim_beta{0.5, -1.0, 0.8, 0.0, 0.3};
};

/// Command-line values that replace the corresponding config entries.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iters;
  std::optional<double> gamma;
  std::optional<double> eps_bar;
  std::optional<std::string> out;
};

namespace detail {

template <class T>
T parse_integer(std::string_view s, std::size_t line, const std::string& key) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw config_error("'" + key + "' expects a non-negative integer, got '" + std::string(s) + "'", line);
  }
  return v;
}

inline double parse_real(std::string_view s, std::size_t line, const std::string& key) {
  double v = 0.0;
  if (!csv::parse_double(s, v) || !std::isfinite(v)) {
    throw config_error("'" + key + "' expects a number, got '" + std::string(s) + "'", line);
  }
  return v;
}

inline std::vector<double> parse_reals(std::string_view s, std::size_t line, const std::string& key) {
  std::vector<double> out;
  for (auto cell : csv::split(s)) out.push_back(parse_real(csv::trim(cell), line, key));
  return out;
}

}  // namespace detail

/**
 * Parses `key = value` lines. `#` starts a comment; blank lines are ignored.
 * `experiment` and `seed` are required. Errors carry the 1-based line number.
 */
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string raw;
  std::size_t lineno = 0;
  bool kernel_given = false;
  bool fixed_eps_given = false;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw config_error("expected 'key = value'", lineno);
    const std::string key(csv::trim(line.substr(0, eq)));
    const std::string_view value = csv::trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("missing key", lineno);
    if (value.empty()) throw config_error("missing value for '" + key + "'", lineno);
    if (!seen.insert(key).second) throw config_error("duplicate key '" + key + "'", lineno);

    auto real = [&] { return detail::parse_real(value, lineno, key); };
    auto reals = [&] { return detail::parse_reals(value, lineno, key); };
    auto count = [&] { return detail::parse_integer<std::size_t>(value, lineno, key); };

    if (key == "experiment") {
      const auto e = parse_experiment(std::string(value));
      if (!e) throw config_error("unknown experiment '" + std::string(value) + "'", lineno);
      c.experiment = *e;
    } else if (key == "kernel") {
      const auto k = parse_kernel_kind(std::string(value));
      if (!k) throw config_error("unknown kernel '" + std::string(value) + "'", lineno);
      c.kernel = *k;
      kernel_given = true;
    } else if (key == "seed") {
      c.seed = detail::parse_integer<std::uint64_t>(value, lineno, key);
    } else if (key == "iters") {
      c.n_iters = count();
    } else if (key == "burn") {
      c.n_burn = count();
    } else if (key == "init") {
      c.init = reals();
    } else if (key == "data") {
      c.data = std::string(value);
    } else if (key == "link") {
      if (value == "logit") c.link = Link::logit;
      else if (value == "probit") c.link = Link::probit;
      else throw config_error("link must be logit or probit", lineno);
    } else if (key == "out") {
      c.out = std::string(value);
    } else if (key == "gamma") {
      c.sampler.gamma = real();
    } else if (key == "beta_ls") {
      c.sampler.beta_ls = real();
    } else if (key == "rho_ls") {
      c.sampler.rho_ls = real();
    } else if (key == "eps_bar") {
      c.sampler.eps_bar = real();
    } else if (key == "u") {
      c.sampler.u = real();
    } else if (key == "max_ls_iters") {
      c.sampler.max_ls_iters = detail::parse_integer<int>(value, lineno, key);
    } else if (key == "eps_min") {
      c.sampler.eps_min = real();
    } else if (key == "metric") {
      if (value == "mchol") c.sampler.metric = MetricKind::mchol;
      else if (value == "eig") c.sampler.metric = MetricKind::eig;
      else if (value == "fisher") c.sampler.metric = MetricKind::fisher;
      else if (value == "identity") c.sampler.metric = MetricKind::identity;
      else throw config_error("unknown metric '" + std::string(value) + "'", lineno);
    } else if (key == "fixed_eps") {
      c.sampler.fixed_eps = real();
      fixed_eps_given = true;
    } else if (key == "hmc_eps") {
      c.sampler.hmc_eps = real();
    } else if (key == "hmc_steps") {
      c.sampler.hmc_steps = detail::parse_integer<int>(value, lineno, key);
    } else if (key == "nu") {
      c.nu = real();
      if (!(c.nu > 0.0)) throw config_error("nu must be positive", lineno);
    } else if (key == "dims") {
      c.dims.clear();
      for (double v : reals()) {
        if (!(v >= 1.0) || v != std::floor(v)) throw config_error("dims must be positive integers", lineno);
        c.dims.push_back(static_cast<std::size_t>(v));
      }
    } else if (key == "eps_grid") {
      c.eps_grid = reals();
    } else if (key == "draws") {
      c.draws = count();
    } else if (key == "sim_params") {
      const auto p = reals();
      if (p.size() != 4) throw config_error("sim_params needs alpha0,alpha1,beta,nu", lineno);
      c.sim_garch = {p[0], p[1], p[2], p[3]};
    } else if (key == "sim_length") {
      c.sim_length = count();
    } else if (key == "sim_seed") {
      c.sim_seed = detail::parse_integer<std::uint64_t>(value, lineno, key);
    } else if (key == "sim_n") {
      c.sim_n = count();
    } else if (key == "sim_beta") {
      c.sim_beta = reals();
    } else {
      throw config_error("unknown key '" + key + "'", lineno);
    }
  }
  if (!seen.contains("experiment")) throw config_error("missing required key 'experiment'");
  if (!seen.contains("seed")) throw config_error("missing required key 'seed'");
  if (!kernel_given) {
    c.kernel = c.experiment == Experiment::pilot_t4_fixed ? KernelKind::fixed_smmala
                                                          : KernelKind::amh_mala;
  }
  if (c.experiment == Experiment::pilot_t4_fixed && !fixed_eps_given) c.sampler.fixed_eps = 0.75;
  return c;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

inline void apply_overrides(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.iters) c.n_iters = *o.iters;
  if (o.gamma) c.sampler.gamma = *o.gamma;
  if (o.eps_bar) c.sampler.eps_bar = *o.eps_bar;
  if (o.out) c.out = *o.out;
}

/// Checks cross-field constraints; throws config_error.
inline void validate(const ExperimentConfig& c) {
  try {
    c.sampler.validate();
  } catch (const input_error& e) {
    throw config_error(e.what());
  }
  if (c.dims.empty()) throw config_error("dims must not be empty");
  if (c.eps_grid.empty()) throw config_error("eps_grid must not be empty");
  for (double e : c.eps_grid) {
    if (!(e > 0.0)) throw config_error("eps_grid entries must be positive");
  }
  if (c.experiment == Experiment::gaussian_energy_law && c.draws < 2) {
    throw config_error("draws must be at least 2");
  }
  if (c.experiment == Experiment::dim_scaling && c.dims.size() < 2) {
    throw config_error("dim-scaling needs at least two dims");
  }
  if (c.out.empty()) throw config_error("out must not be empty");
}

}  // namespace amh
