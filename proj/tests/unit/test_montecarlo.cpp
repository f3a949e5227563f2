#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "twave/errors.hpp"
#include "twave/montecarlo.hpp"

using namespace twave;

namespace {

SDEConfig base_config(const ModelParams& p, long paths, int steps = 100) {
  SDEConfig c;
  c.params = p;
  c.x0 = 0.0;
  c.T = 1.0;
  c.n_steps = steps;
  c.n_paths = paths;
  c.seed = 20240611;
  return c;
}

}  // namespace

TEST(DriftVol, Examples) {
  const auto s = drift_vol(ModelParams::simple(1.0), 0.5);
  EXPECT_DOUBLE_EQ(s.mu, 0.5);
  EXPECT_DOUBLE_EQ(s.sigma, 0.5);
  const auto q = drift_vol(ModelParams::quadratic_drift(1.0), 0.5);
  EXPECT_DOUBLE_EQ(q.mu, 0.375);
  const auto g = drift_vol(ModelParams::general(1.0, 0.5, 0.2, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(g.mu, 1.2);
  EXPECT_NEAR(g.sigma, std::sqrt(2.0 * (0.25 + 0.5)), 1e-15);
}

TEST(DriftVol, DomainErrors) {
  for (double th : {0.0, -0.2, 1.5}) {
    try {
      drift_vol(ModelParams::simple(1.0), th);
      FAIL() << th;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
  }
  EXPECT_THROW(PolicyField::constant(0.0), Error);
  EXPECT_THROW(PolicyField::constant(1.01), Error);
}

TEST(SDEConfigTest, Validation) {
  auto c = base_config(ModelParams::simple(1.0), 1000);
  EXPECT_NO_THROW(c.validate());
  c.T = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = base_config(ModelParams::simple(1.0), 999);
  EXPECT_THROW(c.validate(), Error);
  c = base_config(ModelParams::simple(1.0), 1000, 99);
  EXPECT_THROW(c.validate(), Error);
}

TEST(MonteCarlo, CaraOracleConstantPolicies) {
  // Constant controls make Euler-Maruyama exact in distribution.
  for (const auto& p : {ModelParams::simple(1.0), ModelParams::quadratic_drift(0.7),
                        ModelParams::general(1.0, 0.3, -0.1, 1.5)}) {
    for (double theta : {0.25, 0.5, 1.0}) {
      const auto cfg = base_config(p, 100000);
      const double lambda = 1.5;
      const auto r = simulate(cfg, PolicyField::constant(theta), CaraUtility{lambda});
      const auto dv = drift_vol(p, theta);
      const double exact = oracle::cara_expectation(lambda, dv.mu, dv.sigma * dv.sigma);
      EXPECT_NEAR(exact, cara_constant_policy_value(p, theta, lambda, 0.0, 1.0), 1e-15);
      EXPECT_LT(std::abs(r.mean_utility - exact), 3.0 * r.std_error)
          << to_string(p.variant) << " theta=" << theta;
      EXPECT_EQ(r.flagged_paths, 0);
    }
  }
}

TEST(MonteCarlo, TerminalMomentsGeneral) {
  const auto p = ModelParams::general(1.0, 0.2, 0.1, 1.5);
  const auto cfg = base_config(p, 100000);
  const auto r = simulate(cfg, PolicyField::constant(0.6), CaraUtility{1.0});
  const auto dv = drift_vol(p, 0.6);
  EXPECT_NEAR(r.terminal_variance, dv.sigma * dv.sigma, 0.05 * dv.sigma * dv.sigma);
  EXPECT_NEAR(r.terminal_mean, dv.mu, 4.0 * dv.sigma / std::sqrt(100000.0));
}

TEST(MonteCarlo, StandardErrorScaling) {
  const auto p = ModelParams::simple(1.0);
  const auto pol = PolicyField::constant(0.7);
  double prev = 0.0;
  for (long n : {10000L, 40000L, 160000L}) {
    const auto r = simulate(base_config(p, n), pol, CaraUtility{1.0});
    if (prev > 0.0) EXPECT_NEAR(prev / r.std_error, 2.0, 0.4);
    prev = r.std_error;
  }
}

TEST(MonteCarlo, DeterministicAcrossThreads) {
  const auto p = ModelParams::simple(1.0);
  const auto spec = compute_wave_spec(p, 2.0, 0.5);
  const auto prof = integrate_profile(spec);
  const auto pol = policy_from_wave(spec, prof, 1.0);
  const auto cfg = base_config(p, 5000);
  const auto u = synth_terminal_utility(prof, 1.0);
  const auto a = simulate(cfg, pol, u, 1);
  const auto b = simulate(cfg, pol, u, 3);
  const auto c = simulate(cfg, pol, u, 1);
  EXPECT_EQ(a.mean_utility, b.mean_utility);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.terminal_variance, b.terminal_variance);
  EXPECT_EQ(a.mean_utility, c.mean_utility);
  auto other = cfg;
  other.seed += 1;
  EXPECT_NE(simulate(other, pol, u).mean_utility, a.mean_utility);
}

TEST(Policy, WaveFieldShape) {
  const auto p = ModelParams::simple(1.0);
  const auto spec = compute_wave_spec(p, 2.0, 0.5);
  const auto prof = integrate_profile(spec);
  const auto pol = policy_from_wave(spec, prof, 1.0);
  EXPECT_EQ(pol.provenance(), PolicyProvenance::WaveOptimal);
  EXPECT_EQ(pol.tag(), "wave-optimal");
  EXPECT_DOUBLE_EQ(pol(-1e3, 1.0), 0.5);  // theta = 1/v_left
  EXPECT_DOUBLE_EQ(pol(1e3, 1.0), 1.0);
  EXPECT_NEAR(pol(0.0, 1.0), 1.0, 1e-12);
  // decreasing wave: v falls in x, so theta rises
  double prev = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.5) {
    const double th = pol(x, 0.5);
    EXPECT_GE(th, prev);
    EXPECT_GE(th, kThetaFloor);
    EXPECT_LE(th, 1.0);
    prev = th;
  }
  // theta*(x, t) depends on x + c (T - t)
  EXPECT_NEAR(pol(1.0, 0.0), pol(1.0 + spec.c, 1.0), 1e-12);
}

TEST(Policy, ThreeRootGeneralSaturatesForLowWealth) {
  const auto p = ModelParams::general(1.0, 0.0, 0.0, 1.5);
  const auto roots = find_phi_roots(p, -0.08, 0.1, {1e-3, 1e3});
  const auto spec = compute_wave_spec(p, roots[1].v, roots[2].v);
  const auto pol = policy_from_wave(spec, integrate_profile(spec), 1.0);
  for (double x : {-200.0, -100.0, -60.0}) EXPECT_DOUBLE_EQ(pol(x, 0.0), 1.0);
  EXPECT_LT(pol(200.0, 0.0), 0.1);
}

TEST(Policy, ConstantTag) {
  const auto pol = PolicyField::constant(0.25);
  EXPECT_EQ(pol.tag(), "constant(0.25)");
  EXPECT_EQ(pol.provenance(), PolicyProvenance::Constant);
  EXPECT_DOUBLE_EQ(pol(3.0, 0.2), 0.25);
}

TEST(MonteCarlo, WavePolicyBeatsConstantsSmall) {
  const auto p = ModelParams::simple(1.0);
  const auto spec = compute_wave_spec(p, 2.0, 0.5);
  const auto prof = integrate_profile(spec);
  const auto u = synth_terminal_utility(prof, 1.0);
  const auto cfg = base_config(p, 20000, 200);
  const auto wave = simulate(cfg, policy_from_wave(spec, prof, cfg.T), u);
  for (double th : {0.25, 0.5, 0.75, 1.0}) {
    const auto r = simulate(cfg, PolicyField::constant(th), u);
    EXPECT_GE(wave.mean_utility, r.mean_utility - 3.0 * std::hypot(wave.std_error, r.std_error))
        << th;
  }
}
