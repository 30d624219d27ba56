#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "amh/csv.hpp"
#include "amh/error.hpp"
#include "amh/linalg.hpp"

namespace amh {

/// Log-return series y_1..y_T.
struct ReturnSeries {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

/// Binary-response regression data: design matrix X (n x d) and y in {0,1}^n.
struct DesignData {
  Matrix x;
  Vector y;

  std::size_t n() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

enum class CsvSchema { returns, design };

inline ReturnSeries returns_from_table(const csv::Table& t) {
  if (t.rows.empty()) throw data_error("no data rows");
  if (t.columns() != 1) {
    throw data_error("returns file must have exactly one column, found " +
                     std::to_string(t.columns()));
  }
  ReturnSeries s;
  s.values.reserve(t.rows.size());
  for (const auto& row : t.rows) s.values.push_back(row[0]);
  return s;
}

/// Columns are the covariates followed by the binary response.
inline DesignData design_from_table(const csv::Table& t) {
  if (t.rows.empty()) throw data_error("no data rows");
  if (t.columns() < 2) {
    throw data_error("design file needs at least one covariate column and a response column");
  }
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto d = static_cast<Eigen::Index>(t.columns() - 1);
  DesignData data{Matrix(n, d), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = row[static_cast<std::size_t>(j)];
    const double y = row.back();
    if (y != 0.0 && y != 1.0) {
      throw data_error("response must be 0 or 1", t.line_numbers[static_cast<std::size_t>(i)]);
    }
    data.y(i) = y;
  }
  return data;
}

inline ReturnSeries read_returns_csv(const std::string& path) {
  return returns_from_table(csv::read_table(path));
}

inline DesignData read_design_csv(const std::string& path) {
  return design_from_table(csv::read_table(path));
}

inline void write_returns_csv(const std::string& path, const ReturnSeries& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "y\n";
  for (double v : s.values) out << csv::format_double(v) << '\n';
}

inline void write_design_csv(const std::string& path, const DesignData& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + path + "'");
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) out << csv::format_double(data.x(i, j)) << ',';
    out << (data.y(i) == 1.0 ? "1" : "0") << '\n';
  }
}

/// GARCH(1,1) parameters on the natural scale.
struct GarchParams {
  double alpha0 = 0.05;
  double alpha1 = 0.1;
  double beta = 0.8;
  double nu = 8.0;
};

/**
 * Draws y_i = sqrt(h_i) * sqrt((nu - 2) / nu) * t_nu with h_1 = alpha0 and
 * h_i = alpha0 + alpha1 y_{i-1}^2 + beta h_{i-1}. Deterministic per seed.
 */
inline ReturnSeries simulate_garch(const GarchParams& p, std::size_t length, std::uint64_t seed) {
  if (!(p.alpha0 > 0.0) || !(p.alpha1 >= 0.0) || !(p.beta >= 0.0) || !(p.nu > 2.0) ||
      !(p.alpha1 + p.beta < 1.0)) {
    throw input_error(
        "simulate_garch: need alpha0 > 0, alpha1 >= 0, beta >= 0, alpha1 + beta < 1, nu > 2");
  }
  std::mt19937_64 engine(seed);
  std::student_t_distribution<double> t(p.nu);
  const double scale = std::sqrt((p.nu - 2.0) / p.nu);
  ReturnSeries s;
  s.values.reserve(length);
  double h = p.alpha0;
  double prev = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    if (i > 0) h = p.alpha0 + p.alpha1 * prev * prev + p.beta * h;
    prev = std::sqrt(h) * scale * t(engine);
    s.values.push_back(prev);
  }
  return s;
}

/**
 * Synthetic regression data: an intercept column followed by d - 1 standard
 * normal covariates; responses drawn from the logit or probit model at `beta`.
 */
inline DesignData simulate_binreg(std::size_t n, const Vector& beta, bool probit,
                                  std::uint64_t seed) {
  if (n == 0 || beta.size() == 0) throw input_error("simulate_binreg: empty design");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const auto rows = static_cast<Eigen::Index>(n);
  DesignData data{Matrix(rows, beta.size()), Vector(rows)};
  for (Eigen::Index i = 0; i < rows; ++i) {
    data.x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < beta.size(); ++j) data.x(i, j) = normal(engine);
    const double eta = data.x.row(i).dot(beta);
    const double p = probit ? 0.5 * std::erfc(-eta / std::sqrt(2.0)) : 1.0 / (1.0 + std::exp(-eta));
    data.y(i) = uniform(engine) < p ? 1.0 : 0.0;
  }
  return data;
}

}  // namespace amh
