#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "amh/config.hpp"
#include "amh/csv.hpp"
#include "amh/error.hpp"
#include "amh/experiment.hpp"
#include "amh/targets/dataset.hpp"

namespace amh::cli {

enum ExitCode : int { ok = 0, config_failure = 2, data_failure = 3, numerical_failure = 4 };

/// Runs `body` and maps the library's exceptions onto exit codes.
template <class F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return config_failure;
  } catch (const data_error& e) {
    err << "data error: " << e.what() << '\n';
    return data_failure;
  } catch (const numerical_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  } catch (const input_error& e) {
    err << "config error: " << e.what() << '\n';
    return config_failure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return data_failure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
}

inline int run(const std::string& config_path, const Overrides& overrides, std::ostream& out,
               std::ostream& err) {
  return guarded(
      [&] {
        ExperimentConfig c = parse_config_file(config_path);
        apply_overrides(c, overrides);
        const Json s = run_experiment(c);
        out << "wrote " << c.out << " (" << to_string(c.experiment) << ", seed " << c.seed << ")\n";
        if (s.contains("chain")) {
          out << "acceptance " << s["chain"]["acceptance_rate"].get<double>() << ", min ESS "
              << s["chain"]["min_ess"].get<double>() << '\n';
        }
        return static_cast<int>(ok);
      },
      err);
}

/// Validates a data file. Without an explicit schema a single column is read
/// as a return series and anything wider as design columns plus a 0/1 response.
inline int ingest_check(const std::string& path, const std::string& schema, std::ostream& out,
                        std::ostream& err) {
  return guarded(
      [&] {
        const csv::Table t = csv::read_table(path);
        std::string kind = schema;
        if (kind.empty()) kind = t.columns() <= 1 ? "returns" : "design";
        if (kind == "returns") {
          const auto s = returns_from_table(t);
          out << "ok: returns series with " << s.size() << " observations\n";
        } else if (kind == "design") {
          const auto d = design_from_table(t);
          out << "ok: design with " << d.n() << " rows and " << d.d() << " covariates\n";
        } else {
          throw config_error("schema must be 'returns' or 'design'");
        }
        return static_cast<int>(ok);
      },
      err);
}

inline GarchParams parse_garch_params(const std::string& text) {
  const auto v = detail::parse_reals(text, 0, "params");
  if (v.size() != 4) throw config_error("--params expects alpha0,alpha1,beta,nu");
  return {v[0], v[1], v[2], v[3]};
}

inline int simulate_garch(const std::string& params, std::size_t length, std::uint64_t seed,
                          const std::string& path, std::ostream& out, std::ostream& err) {
  return guarded(
      [&] {
        const GarchParams p = parse_garch_params(params);
        if (length < 1) throw config_error("--T must be positive");
        write_returns_csv(path, amh::simulate_garch(p, length, seed));
        out << "wrote " << length << " returns to " << path << '\n';
        return static_cast<int>(ok);
      },
      err);
}

}  // namespace amh::cli
