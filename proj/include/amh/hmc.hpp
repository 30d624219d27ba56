#pragma once

#include <cmath>
#include <limits>

#include "amh/error.hpp"
#include "amh/rng.hpp"
#include "amh/target.hpp"

namespace amh {

struct LeapfrogResult {
  Vector x;
  Vector p;
  TargetEval eval;
  bool finite = true;
};

/// `steps` leapfrog steps with identity mass, starting from an evaluated point.
inline LeapfrogResult leapfrog(const Vector& x0, const Vector& p0, const TargetEval& eval0,
                               double eps, int steps, const Target& target) {
  LeapfrogResult r{x0, p0, eval0, true};
  for (int l = 0; l < steps; ++l) {
    r.p += 0.5 * eps * r.eval.grad;
    r.x += eps * r.p;
    if (!r.x.allFinite()) {
      r.finite = false;
      return r;
    }
    r.eval = target.eval(r.x);
    if (!r.eval.valid) {
      r.finite = false;
      return r;
    }
    r.p += 0.5 * eps * r.eval.grad;
  }
  r.finite = r.p.allFinite();
  return r;
}

struct HmcResult {
  Vector x;
  TargetEval eval;
  bool accepted = false;
  double eps = 0.0;     // jittered step actually used
  double delta_h = 0.0; // H(start) - H(end)
  double alpha = 0.0;
};

/**
 * Identity-mass HMC transition. Draws, in order: the step-size jitter
 * (uniform on [0.9 eps, 1.1 eps]), the momentum (d normals), and one uniform
 * for the accept test. A non-finite trajectory is rejected.
 */
inline HmcResult hmc_step(const Vector& x, const TargetEval& eval, double eps, int n_leapfrog,
                          const Target& target, ChainRng& rng) {
  if (n_leapfrog < 1) throw input_error("hmc_step: need at least one leapfrog step");
  if (!(eps > 0.0)) throw input_error("hmc_step: step size must be positive");
  HmcResult out{x, eval, false, eps * (0.9 + 0.2 * rng.uniform()), 0.0, 0.0};
  const Vector p0 = rng.normal_vector(static_cast<std::size_t>(x.size()));
  const double unif = rng.uniform();
  const LeapfrogResult lf = leapfrog(x, p0, eval, out.eps, n_leapfrog, target);
  if (!lf.finite) {
    out.delta_h = -std::numeric_limits<double>::infinity();
    return out;
  }
  const double h0 = -eval.logk + 0.5 * p0.squaredNorm();
  const double h1 = -lf.eval.logk + 0.5 * lf.p.squaredNorm();
  out.delta_h = h0 - h1;
  if (std::isnan(out.delta_h)) return out;
  out.alpha = out.delta_h >= 0.0 ? 1.0 : std::exp(out.delta_h);
  if (unif < out.alpha) {
    out.x = lf.x;
    out.eval = lf.eval;
    out.accepted = true;
  }
  return out;
}

}  // namespace amh
