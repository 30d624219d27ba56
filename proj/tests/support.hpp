#pragma once

// Test-only oracles: central finite differences and random matrix generators.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "amh/linalg.hpp"
#include "amh/target.hpp"

namespace amh::testing {

inline double fd_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

/// Central-difference gradient of the log-kernel.
inline Vector fd_gradient(const Target& t, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x(i));
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (t.eval(xp).logk - t.eval(xm).logk) / (2.0 * h);
  }
  return g;
}

/// Central-difference Hessian from the analytic gradient.
inline Matrix fd_hessian(const Target& t, const Vector& x) {
  const Eigen::Index n = x.size();
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = fd_step(x(i));
    Vector xp = x, xm = x;
    xp(i) += s;
    xm(i) -= s;
    h.col(i) = (t.eval(xp).grad - t.eval(xm).grad) / (2.0 * s);
  }
  return h;
}

/// max_i |a_i - b_i| / max(1, max_i |b_i|)
inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

inline Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = z(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// SPD matrix with eigenvalues log-uniform in [lo, lo * cond].
inline Matrix random_spd(int n, double lo, double cond, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Matrix q = random_orthogonal(n, rng);
  Vector lam(n);
  for (int i = 0; i < n; ++i) lam(i) = lo * std::pow(cond, u(rng));
  if (n > 1) {
    lam(0) = lo;
    lam(1) = lo * cond;
  }
  Matrix a = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

/// Symmetric matrix with iid N(0, scale^2) entries; generally indefinite.
inline Matrix random_symmetric(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, scale);
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) a(i, j) = a(j, i) = z(rng);
  return a;
}

}  // namespace amh::testing
