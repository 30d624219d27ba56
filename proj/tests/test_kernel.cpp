#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "amh/chain.hpp"
#include "amh/diagnostics.hpp"
#include "amh/hmc.hpp"
#include "amh/kernel.hpp"
#include "amh/targets/gaussian.hpp"
#include "amh/targets/student_t.hpp"
#include "support.hpp"

namespace amh {
namespace {

// Constant log-kernel on R^d.
class FlatTarget final : public Target {
 public:
  explicit FlatTarget(std::size_t d) : d_(d) {}
  std::size_t dim() const override { return d_; }
  TargetEval eval(const Vector&) const override {
    const auto n = static_cast<Eigen::Index>(d_);
    return {0.0, Vector::Zero(n), SymmetricMatrix(Matrix::Zero(n, n)), true};
  }
  std::string name() const override { return "flat"; }

 private:
  std::size_t d_;
};

// Supported only at the origin: every trial step is rejected by the line search.
class PointTarget final : public Target {
 public:
  std::size_t dim() const override { return 1; }
  TargetEval eval(const Vector& x) const override {
    if (x(0) != 0.0) return TargetEval::invalid(1);
    return {0.0, Vector::Zero(1), -SymmetricMatrix::identity(1), true};
  }
  std::string name() const override { return "point"; }
};

MetricTensor identity_metric(Eigen::Index d) {
  return {Matrix::Identity(d, d), 0.0, MetricKind::identity};
}

TEST(SmmalaPropose, FixedPointAndHandValue) {
  const auto t = GaussianTarget::standard(1);
  const auto e = t.eval(Vector::Zero(1));
  const auto g = identity_metric(1);
  EXPECT_EQ(smmala_propose(Vector::Zero(1), Vector::Zero(1), 0.7, e, g)(0), 0.0);
  EXPECT_EQ(smmala_propose(Vector::Zero(1), Vector::Ones(1), 1.0, e, g)(0), 1.0);
  EXPECT_THROW(smmala_propose(Vector::Zero(1), Vector::Ones(1), 0.0, e, g), input_error);
  EXPECT_THROW(smmala_propose(Vector::Zero(2), Vector::Ones(1), 1.0, e, g), input_error);
}

TEST(SmmalaPropose, MonteCarloMeanMatchesDrift) {
  Matrix sigma(2, 2);
  sigma << 1.0, 0.8, 0.8, 2.0;
  const GaussianTarget t(Vector::Zero(2), sigma);
  const Vector x{{1.5, -0.5}};
  const auto e = t.eval(x);
  const auto m = metric_mchol(e.hess, 0.001);
  const double eps = 0.8;
  const Vector mean = smmala_mean(x, eps, e, m);
  ChainRng rng(17);
  const int n = 100000;
  Vector acc = Vector::Zero(2);
  for (int i = 0; i < n; ++i) acc += smmala_propose(x, rng.normal_vector(2), eps, e, m);
  acc /= n;
  // Proposal covariance is eps^2 G^{-1} = eps^2 Sigma.
  for (int j = 0; j < 2; ++j) {
    const double se = eps * std::sqrt(sigma(j, j) / n);
    EXPECT_NEAR(acc(j), mean(j), 4.0 * se);
  }
}

TEST(EnergyError, HandValueAtOrigin) {
  const auto t = GaussianTarget::standard(1);
  const Vector x = Vector::Zero(1);
  const auto e = t.eval(x);
  const auto trial = energy_error(1.0, x, Vector::Ones(1), e, identity_metric(1), t);
  EXPECT_DOUBLE_EQ(trial.x_star(0), 1.0);
  EXPECT_DOUBLE_EQ(trial.delta, -0.125);
  EXPECT_DOUBLE_EQ(trial.eval_star.logk, -0.5);
}

TEST(EnergyError, VanishesCubicallyForSmallSteps) {
  const auto t = GaussianTarget::standard(1);
  const Vector x{{0.5}};
  const auto e = t.eval(x);
  const double d3 = energy_error(1e-3, x, Vector{{0.7}}, e, identity_metric(1), t).delta;
  EXPECT_LE(std::abs(d3), 1e-8);
  const double d2 = energy_error(2e-3, x, Vector{{0.7}}, e, identity_metric(1), t).delta;
  EXPECT_NEAR(d2 / d3, 8.0, 0.05);
}

TEST(EnergyError, InvalidLandingIsMinusInfinity) {
  const PointTarget t;
  const auto e = t.eval(Vector::Zero(1));
  const auto trial = energy_error(0.5, Vector::Zero(1), Vector::Ones(1), e, identity_metric(1), t);
  EXPECT_FALSE(trial.eval_star.valid);
  EXPECT_EQ(trial.delta, -std::numeric_limits<double>::infinity());
}

// Mean of Delta over stationary (x, w) on N(0, I_d) with G = I.
// With a = 1 - eps^2/2 each coordinate contributes
//   (1 - a^2)/2 - (eps^2/8) ((1 + a)^2 + eps^2) = -eps^6/32,
// and E[exp(Delta)] = 1 because the leapfrog step is a volume-preserving involution.
TEST(EnergyError, GaussianMeanLaw) {
  const std::size_t d = 5;
  const auto t = GaussianTarget::standard(d);
  const auto g = identity_metric(d);
  ChainRng rng(99);
  for (double eps : {0.5, 1.0}) {
    const int n = 20000;
    double s = 0.0, s2 = 0.0, e = 0.0, e2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vector x = rng.normal_vector(d);
      const Vector w = rng.normal_vector(d);
      const double delta = energy_error(eps, x, w, t.eval(x), g, t).delta;
      s += delta;
      s2 += delta * delta;
      e += std::exp(delta);
      e2 += std::exp(2.0 * delta);
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, -static_cast<double>(d) * std::pow(eps, 6) / 32.0, 3.0 * se) << eps;
    const double emean = e / n;
    EXPECT_NEAR(emean, 1.0, 3.0 * std::sqrt((e2 / n - emean * emean) / n)) << eps;
  }
}

TEST(LineSearch, TrialStepBranches) {
  const SamplerConfig cfg;
  EXPECT_EQ(next_trial_step(1.0, 25.0, cfg), 0.5);
  EXPECT_NEAR(next_trial_step(1.0, 8.0, cfg), 0.475, 1e-15);
  EXPECT_EQ(next_trial_step(0.3, 0.5, cfg), 0.3);
  EXPECT_EQ(next_trial_step(1.0, std::numeric_limits<double>::infinity(), cfg), 0.5);
  EXPECT_EQ(next_trial_step(1.0, std::numeric_limits<double>::quiet_NaN(), cfg), 0.5);
  // Strict inequalities: |Delta| = beta uses the cubic model, |Delta| = gamma is not accepted.
  EXPECT_NEAR(next_trial_step(1.0, 10.0, cfg), 0.95 * std::cbrt(0.1), 1e-15);
  EXPECT_NEAR(next_trial_step(1.0, 1.0, cfg), 0.95, 1e-15);
}

TEST(LineSearch, FirstTrialAccepted) {
  const auto t = GaussianTarget::standard(1);
  const Vector x = Vector::Zero(1);
  const auto sel = adaptive_step(x, Vector::Ones(1), t.eval(x), identity_metric(1), t, SamplerConfig{});
  EXPECT_EQ(sel.eps, 1.0);
  EXPECT_EQ(sel.ls_iters, 1);
  EXPECT_DOUBLE_EQ(sel.last_delta, -0.125);
}

TEST(LineSearch, PathologicalTargetStopsAtFloor) {
  const PointTarget t;
  const Vector x = Vector::Zero(1);
  SamplerConfig cfg;
  const auto sel = adaptive_step(x, Vector::Ones(1), t.eval(x), identity_metric(1), t, cfg);
  EXPECT_EQ(sel.eps, cfg.eps_min);
  EXPECT_EQ(sel.ls_iters, 20);  // 2^-19 is the last trial above 1e-6
  cfg.max_ls_iters = 3;
  const auto capped = adaptive_step(x, Vector::Ones(1), t.eval(x), identity_metric(1), t, cfg);
  EXPECT_EQ(capped.eps, 0.125);
  EXPECT_EQ(capped.ls_iters, 3);
}

// Property: eps(x, w) is deterministic and within [eps_min, eps_bar].
TEST(LineSearch, StepIsBoundedAndDeterministic) {
  const StudentTTarget t(4.0);
  SamplerConfig cfg;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const Vector x{{z(rng)}};
    const Vector w{{z(rng)}};
    const auto e = t.eval(x);
    const auto m = metric_mchol(e.hess, cfg.u);
    const auto a = adaptive_step(x, w, e, m, t, cfg);
    const auto b = adaptive_step(x, w, e, m, t, cfg);
    EXPECT_EQ(a.eps, b.eps);
    EXPECT_GE(a.eps, cfg.eps_min);
    EXPECT_LE(a.eps, cfg.eps_bar);
  }
}

TEST(SmmalaLogq, ModeDensity) {
  const auto t = GaussianTarget::standard(3);
  const Vector x = Vector::Zero(3);
  const double lq = smmala_logq(x, x, 1.0, t.eval(x), identity_metric(3));
  EXPECT_DOUBLE_EQ(lq, -1.5 * std::log(2.0 * std::numbers::pi));
}

TEST(SmmalaLogq, MatchesDirectNormalDensity) {
  // G = 4, eps = 0.5: variance eps^2 / G = 1/16.
  const GaussianTarget t(Vector::Zero(1), Matrix::Constant(1, 1, 0.25));
  const Vector from{{0.3}};
  const auto e = t.eval(from);
  const auto g = metric_mchol(e.hess, 0.001);
  const double mean = 0.3 + 0.125 * (-1.2 / 4.0);
  for (double to : {-0.4, 0.1, 0.2625, 0.9}) {
    const double var = 1.0 / 16.0;
    const double direct = -0.5 * std::log(2.0 * std::numbers::pi * var) -
                          (to - mean) * (to - mean) / (2.0 * var);
    EXPECT_NEAR(smmala_logq(Vector{{to}}, from, 0.5, e, g), direct, 1e-13);
  }
  // Depends on x_to only through |L^T (x_to - m)|.
  EXPECT_DOUBLE_EQ(smmala_logq(Vector{{mean + 0.2}}, from, 0.5, e, g),
                   smmala_logq(Vector{{mean - 0.2}}, from, 0.5, e, g));
}

TEST(MwgStep, FlatTargetAlwaysAccepts) {
  const FlatTarget t(2);
  SamplerConfig cfg;
  cfg.metric = MetricKind::identity;
  ChainRng rng(1);
  ChainState s = initial_state(Vector::Zero(2), t, cfg, rng);
  for (int i = 0; i < 200; ++i) {
    auto [next, rec] = mwg_step(s, t, cfg, rng);
    EXPECT_EQ(rec.eps_f, rec.eps_b);
    EXPECT_EQ(rec.alpha, 1.0);
    EXPECT_TRUE(rec.accepted);
    s = std::move(next);
  }
  for (int i = 0; i < 50; ++i) {
    auto [next, rec] = fixed_step_smmala_step(s, 0.6, t, cfg, rng);
    EXPECT_EQ(rec.alpha, 1.0);
    s = std::move(next);
  }
}

TEST(MwgStep, RecordIsConsistent) {
  const StudentTTarget t(4.0);
  SamplerConfig cfg;
  ChainRng rng(12);
  ChainState s = initial_state(Vector{{1.9}}, t, cfg, rng);
  for (int i = 0; i < 300; ++i) {
    const Vector x0 = s.x;
    const Vector w0 = s.w;
    auto [next, rec] = mwg_step(s, t, cfg, rng);
    EXPECT_GE(rec.alpha, 0.0);
    EXPECT_LE(rec.alpha, 1.0);
    EXPECT_GE(rec.eps_f, cfg.eps_min);
    EXPECT_LE(rec.eps_b, cfg.eps_bar);
    EXPECT_EQ(rec.grad_evals, rec.ls_iters_f + 1 + rec.ls_iters_b);
    EXPECT_EQ(next.x, rec.accepted ? rec.x_star : x0);
    EXPECT_NE(next.w, w0);
    s = std::move(next);
  }
}

// Delta^f recorded by the driver is the energy error of the trial (x_t, z) at eps_f.
TEST(MwgStep, ForwardDiagnosticReplaysExactly) {
  const StudentTTarget t(4.0);
  SamplerConfig cfg;
  ChainRng rng(33);
  ChainState s = initial_state(Vector{{0.2}}, t, cfg, rng);
  for (int i = 0; i < 200; ++i) {
    ChainRng replay = rng;
    const Vector z = replay.normal_vector(1);
    auto [next, rec] = mwg_step(s, t, cfg, rng);
    const double delta = energy_error(rec.eps_f, s.x, z, s.eval, s.metric, t).delta;
    EXPECT_EQ(rec.delta_f, delta);
    s = std::move(next);
  }
}

TEST(MwgStep, BackwardDiagnosticMirrorsForwardForGaussian) {
  // On a Gaussian with G = -H the leapfrog step is reversible, so Delta^b = -Delta^f
  // when eps_f = eps_b.
  const auto t = GaussianTarget::standard(3);
  SamplerConfig cfg;
  ChainRng rng(8);
  ChainState s = initial_state(Vector{{0.3, -1.0, 0.5}}, t, cfg, rng);
  for (int i = 0; i < 50; ++i) {
    auto [next, rec] = fixed_step_smmala_step(s, 0.9, t, cfg, rng);
    EXPECT_NEAR(rec.delta_b, -rec.delta_f, 1e-12);
    s = std::move(next);
  }
}

TEST(FixedStep, SmallStepAcceptsAlmostAll) {
  const auto t = GaussianTarget::standard(1);
  SamplerConfig cfg;
  cfg.fixed_eps = 0.05;
  const Trace tr = run_chain(t, KernelKind::fixed_smmala, 5000, 0, 4, Vector::Zero(1), cfg);
  EXPECT_GT(acceptance_rate(tr), 0.95);
}

TEST(Hmc, ZeroMomentumAtModeStays) {
  const auto t = GaussianTarget::standard(2);
  const Vector x = Vector::Zero(2);
  const auto lf = leapfrog(x, Vector::Zero(2), t.eval(x), 0.1, 10, t);
  EXPECT_TRUE(lf.finite);
  EXPECT_EQ(lf.x, x);
  EXPECT_EQ(lf.p, Vector::Zero(2));
}

TEST(Hmc, LeapfrogIsReversible) {
  const StudentTTarget t(4.0);
  const Vector x{{0.7}};
  const Vector p{{1.3}};
  const auto fwd = leapfrog(x, p, t.eval(x), 0.1, 25, t);
  const auto back = leapfrog(fwd.x, -fwd.p, fwd.eval, 0.1, 25, t);
  EXPECT_NEAR(back.x(0), x(0), 1e-10);
  EXPECT_NEAR(back.p(0), -p(0), 1e-10);
}

TEST(Hmc, StepSizeIsJittered) {
  const auto t = GaussianTarget::standard(1);
  ChainRng rng(2);
  const Vector x = Vector::Zero(1);
  for (int i = 0; i < 100; ++i) {
    const auto r = hmc_step(x, t.eval(x), 0.1, 10, t, rng);
    EXPECT_GE(r.eps, 0.09);
    EXPECT_LE(r.eps, 0.11);
  }
  EXPECT_THROW(hmc_step(x, t.eval(x), 0.1, 0, t, rng), input_error);
}

TEST(Hmc, StandardNormalMoments) {
  const auto t = GaussianTarget::standard(1);
  const Trace tr = run_chain(t, KernelKind::hmc, 100000, 0, 21, Vector::Zero(1));
  const auto xs = tr.coordinate(0);
  std::vector<double> sq;
  double m = 0.0, v = 0.0;
  for (double x : xs) {
    m += x;
    sq.push_back(x * x);
  }
  m /= xs.size();
  for (double s : sq) v += s;
  v /= xs.size();
  const double se_m = 1.0 / std::sqrt(ess_imse(xs).ess);
  const double se_v = std::sqrt(2.0 / ess_imse(sq).ess);
  EXPECT_NEAR(m, 0.0, 3.0 * se_m);
  EXPECT_NEAR(v, 1.0, 3.0 * se_v);
}

// Detailed balance of the x-update for a fixed w, on a 1-D t4 target.
// Transition density of the accepted move: k_w(x -> y) = q(y | x, eps(x, w)) alpha_w(x, y).
class DetailedBalance : public ::testing::Test {
 protected:
  StudentTTarget target{4.0};
  SamplerConfig cfg;
  Vector w{{0.8}};

  double eps_at(const Vector& x) const {
    const auto e = target.eval(x);
    return adaptive_step(x, w, e, metric_mchol(e.hess, cfg.u), target, cfg).eps;
  }

  double log_q(double to, double from) const {
    const Vector xf{{from}};
    const auto e = target.eval(xf);
    return smmala_logq(Vector{{to}}, xf, eps_at(xf), e, metric_mchol(e.hess, cfg.u));
  }

  double log_flow(double x, double y) const {
    const double lp_x = target.eval(Vector{{x}}).logk;
    const double lp_y = target.eval(Vector{{y}}).logk;
    const double la = std::min(0.0, lp_y + log_q(x, y) - lp_x - log_q(y, x));
    return lp_x + log_q(y, x) + la;
  }
};

TEST_F(DetailedBalance, ThreePoints) {
  const double pts[3] = {-0.4, 1.1, 2.0};
  for (double a : pts) {
    for (double b : pts) {
      if (a == b) continue;
      const double ab = std::exp(log_flow(a, b));
      const double ba = std::exp(log_flow(b, a));
      EXPECT_LE(std::abs(ab - ba), 1e-6 * std::max(ab, ba)) << a << " -> " << b;
    }
  }
}

TEST_F(DetailedBalance, IntegratedOverCells) {
  // Probability flow between three cells by trapezoidal quadrature on a common grid.
  const double edges[4] = {-0.5, 0.0, 1.5, 2.5};
  const int m = 60;
  auto grid = [&](int c, int i) { return edges[c] + (edges[c + 1] - edges[c]) * i / m; };
  auto weight = [&](int c, int i) {
    return (edges[c + 1] - edges[c]) / m * ((i == 0 || i == m) ? 0.5 : 1.0);
  };
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      double ab = 0.0, ba = 0.0;
      for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= m; ++j) {
          const double x = grid(a, i), y = grid(b, j);
          const double wgt = weight(a, i) * weight(b, j);
          ab += wgt * std::exp(log_flow(x, y));
          ba += wgt * std::exp(log_flow(y, x));
        }
      }
      EXPECT_LE(std::abs(ab - ba), 1e-6 * ab) << a << " <-> " << b;
    }
  }
}

TEST(InitialState, RejectsBadInit) {
  const PointTarget t;
  ChainRng rng(1);
  EXPECT_THROW(initial_state(Vector{{1.0}}, t, SamplerConfig{}, rng), input_error);
  EXPECT_THROW(initial_state(Vector::Zero(2), t, SamplerConfig{}, rng), input_error);
}

TEST(SamplerConfig, Validation) {
  SamplerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gamma = 20.0;
  EXPECT_THROW(c.validate(), input_error);
  c = {};
  c.rho_ls = 1.0;
  EXPECT_THROW(c.validate(), input_error);
  c = {};
  c.eps_min = 2.0;
  EXPECT_THROW(c.validate(), input_error);
  c = {};
  c.u = 0.0;
  EXPECT_THROW(c.validate(), input_error);
}

}  // namespace
}  // namespace amh
