#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"

#include "amh/chain.hpp"
#include "amh/config.hpp"
#include "amh/csv.hpp"
#include "amh/diagnostics.hpp"
#include "amh/targets/binreg.hpp"
#include "amh/targets/dataset.hpp"
#include "amh/targets/garch.hpp"
#include "amh/targets/gaussian.hpp"
#include "amh/targets/student_t.hpp"

namespace amh {

using Json = nlohmann::ordered_json;

/// One row per retained iteration; every real printed with 17 significant digits.
inline void write_trace_csv(std::ostream& os, const Trace& t) {
  os << "iter";
  for (std::size_t j = 0; j < t.dim(); ++j) os << ",x_" << j + 1;
  os << ",eps_f,eps_b,delta_f,delta_b,accepted,ls_iters,grad_evals\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    os << t.n_burn + i + 1;
    for (Eigen::Index j = 0; j < r.x.size(); ++j) os << ',' << csv::format_double(r.x(j));
    const auto& p = r.record;
    os << ',' << csv::format_double(p.eps_f) << ',' << csv::format_double(p.eps_b) << ','
       << csv::format_double(p.delta_f) << ',' << csv::format_double(p.delta_b) << ','
       << (p.accepted ? 1 : 0) << ',' << p.ls_iters_f + p.ls_iters_b << ',' << p.grad_evals
       << '\n';
  }
}

inline void write_trace_csv(const std::filesystem::path& path, const Trace& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot write '" + path.string() + "'");
  write_trace_csv(os, t);
}

inline void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfileBin>& bins) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot write '" + path.string() + "'");
  os << "lo,hi,mean_eps_f,count\n";
  for (const auto& b : bins) {
    os << csv::format_double(b.lo) << ',' << csv::format_double(b.hi) << ','
       << csv::format_double(b.mean_eps) << ',' << b.count << '\n';
  }
}

/// Non-finite reals become null.
inline Json json_real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json config_json(const ExperimentConfig& c) {
  const auto& s = c.sampler;
  Json j;
  j["experiment"] = to_string(c.experiment);
  j["kernel"] = to_string(c.kernel);
  j["iters"] = c.n_iters;
  j["burn"] = c.n_burn;
  j["init"] = c.init;
  j["data"] = c.data;
  j["link"] = to_string(c.link);
  j["out"] = c.out;
  j["gamma"] = s.gamma;
  j["beta_ls"] = s.beta_ls;
  j["rho_ls"] = s.rho_ls;
  j["eps_bar"] = s.eps_bar;
  j["u"] = s.u;
  j["max_ls_iters"] = s.max_ls_iters;
  j["eps_min"] = s.eps_min;
  j["metric"] = to_string(kernel_metric(c.kernel, s.metric));
  j["fixed_eps"] = s.fixed_eps;
  j["hmc_eps"] = s.hmc_eps;
  j["hmc_steps"] = s.hmc_steps;
  return j;
}

inline Json chain_json(const Trace& t) {
  const EssReport r = ess_report(t);
  Json j;
  j["iterations"] = r.iterations;
  j["burn_in"] = t.n_burn;
  j["acceptance_rate"] = t.rows.empty() ? 0.0 : acceptance_rate(t);
  j["ess"] = r.ess;
  j["min_ess"] = r.min_ess;
  j["median_ess"] = r.median_ess;
  j["max_ess"] = r.max_ess;
  j["seconds"] = r.seconds;
  j["grad_evals"] = r.grad_evals;
  j["burn_grad_evals"] = t.burn_grad_evals;
  j["min_ess_per_second"] = r.min_ess_per_second;
  j["min_ess_per_grad_eval"] = r.min_ess_per_grad_eval;
  std::vector<double> eps;
  for (const auto& row : t.rows) eps.push_back(row.record.eps_f);
  j["median_eps_f"] = eps.empty() ? 0.0 : median(eps);
  return j;
}

/// Bins of width 0.5 centred on multiples of 0.5 over [-4, 4].
inline std::vector<double> pilot_profile_edges() {
  std::vector<double> e;
  for (int k = -8; k <= 9; ++k) e.push_back(-4.25 + 0.5 * (k + 8));
  return e;
}

/// Mean eps_f of the profile bin containing `x`, 0 when that bin is empty.
inline double profile_mean_at(const std::vector<ProfileBin>& bins, double x) {
  for (const auto& b : bins) {
    if (x >= b.lo && x < b.hi) return b.mean_eps;
  }
  return 0.0;
}

inline double fraction_in(const Trace& t, double lo, double hi) {
  if (t.rows.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& r : t.rows) n += (r.x(0) > lo && r.x(0) < hi) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(t.rows.size());
}

/// Monte Carlo mean of the energy error over stationary (x, w) for N(0, I_d) with G = I.
struct EnergyLawPoint {
  std::size_t dim = 0;
  double eps = 0.0;
  double mean = 0.0;
  double se = 0.0;
};

inline EnergyLawPoint energy_law_point(std::size_t d, double eps, std::size_t draws, ChainRng& rng) {
  const GaussianTarget t = GaussianTarget::standard(d);
  const auto n = static_cast<Eigen::Index>(d);
  const MetricTensor g{Matrix::Identity(n, n), 0.0, MetricKind::identity};
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const Vector x = rng.normal_vector(d);
    const Vector w = rng.normal_vector(d);
    const double delta = energy_error(eps, x, w, t.eval(x), g, t).delta;
    s += delta;
    s2 += delta * delta;
  }
  const double m = s / static_cast<double>(draws);
  const double var = std::max(0.0, s2 / static_cast<double>(draws) - m * m);
  return {d, eps, m, std::sqrt(var / static_cast<double>(draws))};
}

/// Least-squares slope of log y on log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

namespace detail {

inline Vector init_or(const ExperimentConfig& c, const Vector& fallback) {
  if (c.init.empty()) return fallback;
  if (c.init.size() != static_cast<std::size_t>(fallback.size())) {
    throw config_error("init has " + std::to_string(c.init.size()) + " entries, target has " +
                       std::to_string(fallback.size()));
  }
  return Eigen::Map<const Vector>(c.init.data(), static_cast<Eigen::Index>(c.init.size()));
}

inline ReturnSeries garch_data(const ExperimentConfig& c) {
  if (!c.data.empty()) {
    if (!std::filesystem::exists(c.data)) throw data_error("data file '" + c.data + "' does not exist");
    return read_returns_csv(c.data);
  }
  return simulate_garch(c.sim_garch, c.sim_length, c.sim_seed);
}

inline DesignData binreg_data(const ExperimentConfig& c) {
  if (!c.data.empty()) {
    if (!std::filesystem::exists(c.data)) throw data_error("data file '" + c.data + "' does not exist");
    return read_design_csv(c.data);
  }
  const Vector beta = Eigen::Map<const Vector>(c.sim_beta.data(),
                                               static_cast<Eigen::Index>(c.sim_beta.size()));
  return simulate_binreg(c.sim_n, beta, c.link == Link::probit, c.sim_seed);
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot write '" + path.string() + "'");
  os << j.dump(2) << '\n';
}

}  // namespace detail

/**
 * Runs one configured experiment and writes its artifacts into `c.out`:
 * trace.csv and summary.json for chain experiments, profile.csv for the
 * pilots, energy_law.csv and dim_scaling.csv for the two Gaussian studies.
 * Returns the summary that was written.
 */
inline Json run_experiment(const ExperimentConfig& c) {
  validate(c);
  const std::filesystem::path out(c.out);
  std::filesystem::create_directories(out);

  Json summary;
  summary["experiment"] = to_string(c.experiment);
  summary["seed"] = c.seed;
  summary["config"] = config_json(c);

  switch (c.experiment) {
    case Experiment::pilot_t4_fixed:
    case Experiment::pilot_t4_adaptive: {
      const StudentTTarget target(c.nu);
      const Vector init = detail::init_or(c, Vector::Zero(1));
      const Trace t = run_chain(target, c.kernel, c.n_iters, c.n_burn, c.seed, init, c.sampler);
      write_trace_csv(out / "trace.csv", t);
      const Vector* start = c.n_burn == 0 ? &init : nullptr;
      const auto bins = step_size_profile(t, pilot_profile_edges(), start);
      write_profile_csv(out / "profile.csv", bins);
      summary["chain"] = chain_json(t);
      Json p;
      p["max_stick_run_1.7_2.3"] = t.rows.empty() ? 0 : max_stick_run(t, abs_band(1.7, 2.3));
      p["occupancy_1.8_2.2"] = fraction_in(t, 1.8, 2.2);
      const boost::math::students_t_distribution<double> dist(c.nu);
      p["true_probability_1.8_2.2"] = boost::math::cdf(dist, 2.2) - boost::math::cdf(dist, 1.8);
      p["mean_eps_f_near_0"] = profile_mean_at(bins, 0.0);
      p["mean_eps_f_near_2"] = profile_mean_at(bins, 2.0);
      summary["pilot"] = p;
      break;
    }
    case Experiment::gaussian_energy_law: {
      ChainRng rng(c.seed);
      std::ofstream os(out / "energy_law.csv", std::ios::binary);
      if (!os) throw data_error("cannot write energy_law.csv");
      os << "d,eps,mean_delta,se,exact_mean,quartic_formula\n";
      Json rows = Json::array();
      for (std::size_t d : c.dims) {
        for (double eps : c.eps_grid) {
          const auto pt = energy_law_point(d, eps, c.draws, rng);
          const double dd = static_cast<double>(d);
          const double exact = -dd * std::pow(eps, 6) / 32.0;
          const double quartic = dd * (std::pow(eps, 4) / 4.0 - std::pow(eps, 6) / 32.0);
          os << d << ',' << csv::format_double(eps) << ',' << csv::format_double(pt.mean) << ','
             << csv::format_double(pt.se) << ',' << csv::format_double(exact) << ','
             << csv::format_double(quartic) << '\n';
          rows.push_back({{"d", d}, {"eps", eps}, {"mean_delta", pt.mean}, {"se", pt.se},
                          {"exact_mean", exact}, {"quartic_formula", quartic}});
        }
      }
      summary["energy_law"] = rows;
      break;
    }
    case Experiment::dim_scaling: {
      std::ofstream os(out / "dim_scaling.csv", std::ios::binary);
      if (!os) throw data_error("cannot write dim_scaling.csv");
      os << "d,median_eps_f,acceptance_rate\n";
      std::vector<double> ds, meds;
      Json rows = Json::array();
      for (std::size_t d : c.dims) {
        const GaussianTarget target = GaussianTarget::standard(d);
        const Trace t = run_chain(target, c.kernel, c.n_iters, c.n_burn, c.seed + d,
                                  Vector::Zero(static_cast<Eigen::Index>(d)), c.sampler);
        write_trace_csv(out / ("trace_d" + std::to_string(d) + ".csv"), t);
        std::vector<double> eps;
        for (const auto& r : t.rows) eps.push_back(r.record.eps_f);
        const double med = eps.empty() ? 0.0 : median(eps);
        const double acc = t.rows.empty() ? 0.0 : acceptance_rate(t);
        ds.push_back(static_cast<double>(d));
        meds.push_back(med);
        os << d << ',' << csv::format_double(med) << ',' << csv::format_double(acc) << '\n';
        rows.push_back({{"d", d}, {"median_eps_f", med}, {"acceptance_rate", acc}});
      }
      summary["dim_scaling"] = rows;
      summary["log_log_slope"] = json_real(log_log_slope(ds, meds));
      break;
    }
    case Experiment::garch: {
      const GarchTTarget target(detail::garch_data(c));
      const Vector fallback{{std::log(0.05), std::log(0.1), std::log(0.8), std::log(6.0)}};
      const Trace t = run_chain(target, c.kernel, c.n_iters, c.n_burn, c.seed,
                                detail::init_or(c, fallback), c.sampler);
      write_trace_csv(out / "trace.csv", t);
      summary["chain"] = chain_json(t);
      break;
    }
    case Experiment::binreg: {
      const BinRegTarget target(detail::binreg_data(c), c.link);
      const Vector fallback = Vector::Zero(static_cast<Eigen::Index>(target.dim()));
      const Trace t = run_chain(target, c.kernel, c.n_iters, c.n_burn, c.seed,
                                detail::init_or(c, fallback), c.sampler);
      write_trace_csv(out / "trace.csv", t);
      summary["chain"] = chain_json(t);
      break;
    }
  }
  detail::write_json(out / "summary.json", summary);
  return summary;
}

}  // namespace amh
