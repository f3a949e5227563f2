// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "twave/twave.hpp"

using namespace twave;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// z' must keep one sign across the whole profile.
bool strictly_monotone(const WaveProfile& prof) {
  int sign = 0;
  for (std::size_t i = 1; i < prof.z.size(); ++i) {
    const double d = prof.z[i] - prof.z[i - 1];
    if (d == 0.0) continue;  // flat once the tail has converged
    const int s = d > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return sign != 0;
}

std::vector<double> uniform_grid(double lo, double hi, double dx) {
  std::vector<double> x;
  const auto n = static_cast<int>(std::lround((hi - lo) / dx));
  for (int i = 0; i <= n; ++i) x.push_back(lo + i * dx);
  return x;
}

std::deque<WaveProfile> g_profiles;  // every profile integrated, for criterion 10

const WaveProfile& keep(WaveProfile p) {
  g_profiles.push_back(std::move(p));
  return g_profiles.back();
}

// 1. A, B, A', B' continuous at phi = 1.
Outcome closure_continuity() {
  Outcome o;
  oracle::Draws d(101);
  double worst = 0.0;
  const double below = 1.0, above = std::nextafter(1.0, 2.0);
  auto jump = [&](const ModelParams& p) {
    const auto a = eval_closures(p, below), b = eval_closures(p, above);
    return std::max({std::abs(a.A - b.A), std::abs(a.A_prime - b.A_prime),
                     std::abs(a.B - b.B), std::abs(a.B_prime - b.B_prime)});
  };
  for (int i = 0; i < 100; ++i) {
    const double omega = d.uniform(0.1, 5.0);
    const ModelParams ps[] = {
        ModelParams::simple(omega), ModelParams::quadratic_drift(omega),
        ModelParams::general(omega, d.uniform(0.0, 2.0), d.uniform(-1.0, 1.0),
                             d.uniform(1.01, 4.0))};
    for (const auto& p : ps) worst = std::max(worst, jump(p));
  }
  o.pass = worst < 1e-12;
  o.detail = fmt("max jump %.3g over 300 closures", worst);
  return o;
}

// 2. Simple example roots.
Outcome simple_roots() {
  Outcome o;
  const auto p = ModelParams::simple(1.0);
  const auto spec = compute_wave_spec(p, 2.0, 0.5);
  o.require(std::abs(spec.c - 1.0 / 12.0) < 1e-14, fmt("c=%.17g", spec.c));
  o.require(std::abs(spec.c - oracle::simple_speed(1.0, 2.0, 0.5)) < 1e-14, "c vs oracle");
  o.require(std::abs(spec.K0 + 1.0 / 6.0) < 1e-14, fmt("K0=%.17g", spec.K0));
  const auto z = analytic_z_roots_simple(1.0, spec.c, spec.K0);
  o.require(std::abs(z.z_plus - 0.25) < 1e-12, fmt("z+=%.17g", z.z_plus));
  o.require(std::abs(z.z_minus - 0.75) < 1e-12, fmt("z-=%.17g", z.z_minus));
  const auto oz = oracle::simple_z_roots(1.0, spec.c, spec.K0);
  o.require(std::abs(oz.z_plus - z.z_plus) < 1e-12 && std::abs(oz.z_minus - z.z_minus) < 1e-12,
            "closed form vs oracle quadratics");
  const auto roots = find_phi_roots(p, spec.c, spec.K0, {1e-3, 1e3});
  o.require(roots.size() == 2, fmt("%g numeric roots", double(roots.size())));
  if (roots.size() == 2) {
    const double zp = eval_A(p, roots[0].v), zm = eval_A(p, roots[1].v);
    o.require(std::abs(zp - z.z_plus) < 1e-9 && std::abs(zm - z.z_minus) < 1e-9,
              fmt("numeric z %.12g %.12g", zp, zm));
  }
  if (o.pass) o.detail = fmt("c=%.15g K0=%.15g z+=%.15g", spec.c, spec.K0, z.z_plus);
  return o;
}

// 3. General example A.
Outcome general_example_a() {
  Outcome o;
  const auto p = ModelParams::general(1.0, 0.0, 0.0, 1.5);
  const double c = -0.1, K0 = 0.1;
  const auto roots = find_phi_roots(p, c, K0, {1e-3, 1e3});
  auto near = [&](double v, double tol) {
    for (const auto& r : roots)
      if (std::abs(r.v - v) < tol) return r.v;
    return std::nan("");
  };
  const double vm = near(1.0, 1e-9), vp = near(10.0 / 3.0, 1e-8);
  o.require(std::isfinite(vm), "root at 1 missing");
  o.require(std::isfinite(vp), "root at 10/3 missing");
  // per-branch polynomial oracle
  auto lower = oracle::general_lower_roots(1.0, 1.5, c, K0);
  auto upper = oracle::general_m15_upper_roots(1.0, c, K0);
  o.require(!upper.empty() && std::abs(upper.back() - 10.0 / 3.0) < 1e-12, "oracle upper root");
  o.require(lower.size() == 2 && std::abs(lower[1] - 1.0) < 1e-12, "oracle lower roots");
  if (!o.pass) return o;
  const double zm = eval_A(p, vm), zp = eval_A(p, vp);
  o.require(std::abs(zm - 2.0 / 3.0) < 1e-9, fmt("z-=%.12g", zm));
  o.require(std::abs(zp - 0.97) < 1e-3, fmt("z+=%.12g", zp));
  const double g1 = eval_G_prime(p, c, K0, 1.0), g2 = eval_G_prime(p, c, K0, 10.0 / 3.0);
  o.require(std::abs(g1 - 7.0 / 30.0) < 1e-9, fmt("G'(1)=%.12g", g1));
  o.require(std::abs(g2 + 0.07) < 1e-9, fmt("G'(10/3)=%.12g", g2));
  const auto spec = compute_wave_spec(p, vm, vp);
  o.require(std::abs(spec.c - c) < 1e-9 && std::abs(spec.K0 - K0) < 1e-9, "chord c, K0");
  if (o.pass) o.detail = fmt("z+=%.6f G'(1)=%.12g G'(10/3)=%.12g", zp, g1, g2);
  return o;
}

// 4. General example B.
Outcome general_example_b() {
  Outcome o;
  const auto p = ModelParams::general(1.0, 0.0, 0.0, 1.5);
  const double c = -0.08, K0 = 0.1;
  const auto roots = find_phi_roots(p, c, K0, {1e-3, 1e3});
  o.require(roots.size() == 3, fmt("%g roots", double(roots.size())));
  if (!o.pass) return o;
  o.require(std::abs(roots[1].v - 0.888) < 5e-3, fmt("root %.6f vs 0.888", roots[1].v));
  o.require(std::abs(roots[2].v - 4.488) < 5e-3, fmt("root %.6f vs 4.488", roots[2].v));
  o.require(std::abs(roots[0].v - 0.732) < 5e-3, fmt("root %.6f vs 0.732", roots[0].v));
  auto lower = oracle::general_lower_roots(1.0, 1.5, c, K0);
  auto upper = oracle::general_m15_upper_roots(1.0, c, K0);
  o.require(lower.size() == 2 && upper.size() == 1, "oracle root count");
  if (!o.pass) return o;
  const double ref[] = {lower[0], lower[1], upper[0]};
  for (int i = 0; i < 3; ++i)
    o.require(std::abs(roots[i].v - ref[i]) < 1e-9, fmt("root %g off oracle", i));
  if (o.pass) o.detail = fmt("roots %.6f %.6f %.6f", roots[0].v, roots[1].v, roots[2].v);
  return o;
}

// 5. Profile identity.
Outcome profile_identity() {
  Outcome o;
  const ModelParams ps[] = {ModelParams::simple(1.0), ModelParams::general(1.0, 0.0, 0.0, 1.5)};
  const double lims[][2] = {{2.0, 0.5}, {1.0, 10.0 / 3.0}};
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto spec = compute_wave_spec(ps[i], lims[i][0], lims[i][1]);
    const auto& prof = keep(integrate_profile(spec));
    const double r = residual_constant(prof, spec);
    worst = std::max(worst, r);
    o.require(r < 1e-6, fmt("residual %.3g (case %g)", r, i));
  }
  if (o.pass) o.detail = fmt("max residual %.3g", worst);
  return o;
}

// 6. PDE translation.
Outcome pde_translation() {
  Outcome o;
  const ModelParams ps[] = {ModelParams::simple(1.0), ModelParams::general(1.0, 0.0, 0.0, 1.5)};
  const double lims[][2] = {{2.0, 0.5}, {1.0, 10.0 / 3.0}};
  std::string detail;
  for (int i = 0; i < 2; ++i) {
    const auto spec = compute_wave_spec(ps[i], lims[i][0], lims[i][1]);
    const auto prof = integrate_profile(spec);
    VerifyOptions fine;
    fine.n_cells = 2048;
    fine.widths_of_travel = 10.0;
    auto coarse = fine;
    coarse.n_cells = 1024;
    const auto vf = verify_wave(spec, prof, fine);
    const auto vc = verify_wave(spec, prof, coarse);
    const double travel = std::abs(spec.c) * vf.horizon_tau / vf.width;
    const double ratio = vc.max_norm_error / vf.max_norm_error;
    o.require(travel >= 10.0 - 1e-9, fmt("travel %.3g widths", travel));
    o.require(vf.speed_rel_error < 0.02, fmt("speed error %.3g (case %g)", vf.speed_rel_error, i));
    o.require(ratio >= 3.0, fmt("halving ratio %.3g (case %g)", ratio, i));
    detail += fmt("case %g: speed err %.2g, ratio %.3g; ", i, vf.speed_rel_error, ratio);
  }
  if (o.pass) o.detail = detail;
  return o;
}

// 7. Maximum-principle bounds.
Outcome max_principle() {
  Outcome o;
  oracle::Draws d(707);
  const auto g = SpatialGrid::make(-10.0, 10.0, 256);
  const auto xs = g.centers();
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double omega = d.uniform(0.3, 3.0);
    ModelParams p;
    switch (trial % 3) {
      case 0: p = ModelParams::simple(omega); break;
      case 1: p = ModelParams::quadratic_drift(omega); break;
      default: p = ModelParams::general(omega, d.uniform(0.0, 1.0), d.uniform(-0.5, 0.5),
                                        d.uniform(1.2, 3.0));
    }
    const double lo = d.uniform(0.1, 1.0), amp = d.uniform(0.2, 2.5);
    const double a = d.uniform(-3.0, 3.0), w = d.uniform(0.3, 2.0), k = d.uniform(1.0, 4.0);
    std::vector<double> phi(xs.size());
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      phi[i] = lo + amp / (1.0 + std::exp(-w * (xs[i] - a))) +
               0.3 * amp * std::exp(-k * xs[i] * xs[i]);
      mn = std::min(mn, phi[i]);
      mx = std::max(mx, phi[i]);
    }
    const auto ev = evolve(p, phi, 2.0, g);
    const auto rep = check_bounds(ev, omega * mn, omega * mx, omega);
    worst = std::max({worst, mn - rep.observed_min, rep.observed_max - mx});
    o.require(rep.pass, fmt("trial %g left [%.6g, %.6g]", trial, rep.observed_min,
                            rep.observed_max));
  }
  if (o.pass) o.detail = fmt("worst excursion %.3g", worst);
  return o;
}

// 8. Riccati round trip.
Outcome riccati_round_trip() {
  Outcome o;
  const auto x = uniform_grid(-10.0, 10.0, 1e-3);
  oracle::Draws d(808);
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const auto p = trial % 2 ? ModelParams::quadratic_drift(d.uniform(0.2, 3.0))
                             : ModelParams::simple(d.uniform(0.2, 3.0));
    const double a = d.uniform(0.5, 2.0), b = d.uniform(0.0, 0.4), k = d.uniform(0.2, 3.0);
    const double s = d.uniform(0.0, 0.3), w = d.uniform(0.5, 4.0);
    std::vector<double> phi(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      phi[i] = a + b * std::tanh(k * x[i]) + s * std::sin(w * x[i]);
    const auto back = phi_from_curve(marginal_from_phi(x, phi, p, 0.0), p);
    for (std::size_t i = 0; i < back.size(); ++i)
      worst = std::max(worst, std::abs(back[i] - phi[i + 1]));
  }
  o.require(worst < 1e-4, fmt("round trip max error %.3g", worst));
  double cara = 0.0;
  for (double lambda : {0.3, 1.0, 2.5}) {
    const auto p = ModelParams::simple(1.3);
    std::vector<double> phi(x.size(), lambda / p.omega);
    const auto curve = marginal_from_phi(x, phi, p, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      cara = std::max(cara, std::abs(curve.Vx[i] / std::exp(-lambda * x[i]) - 1.0));
    for (double v : phi_from_curve(curve, p)) cara = std::max(cara, std::abs(v - phi[0]));
  }
  o.require(cara < 1e-10, fmt("CARA error %.3g", cara));
  if (o.pass) o.detail = fmt("round trip %.3g, CARA %.3g", worst, cara);
  return o;
}

// 9. Monte Carlo.
Outcome monte_carlo() {
  Outcome o;
  SDEConfig cfg;
  cfg.params = ModelParams::simple(1.0);
  cfg.n_paths = 100000;
  cfg.n_steps = 1000;
  cfg.seed = 90210;
  const double lambda = 1.2;
  double worst_z = 0.0;
  // (a) constant controls are exact under Euler-Maruyama, so the Gaussian oracle applies
  for (const auto& p : {ModelParams::simple(1.0), ModelParams::general(1.0, 0.3, 0.1, 1.5)}) {
    for (double th : {0.25, 0.5, 1.0}) {
      auto c = cfg;
      c.params = p;
      c.n_steps = 100;
      const auto r = simulate(c, PolicyField::constant(th), CaraUtility{lambda});
      const auto dv = drift_vol(p, th);
      const double exact = oracle::cara_expectation(lambda, dv.mu, dv.sigma * dv.sigma);
      const double z = std::abs(r.mean_utility - exact) / r.std_error;
      worst_z = std::max(worst_z, z);
      o.require(z < 3.0, fmt("(a) theta=%g z=%.3g", th, z));
    }
  }
  // (b) wave-optimal against constants, Simple example
  const auto spec = compute_wave_spec(cfg.params, 2.0, 0.5);
  const auto& prof = keep(integrate_profile(spec));
  const auto u = synth_terminal_utility(prof, cfg.params.omega);
  const auto pol = policy_from_wave(spec, prof, cfg.T);
  const auto wave = simulate(cfg, pol, u);
  double margin = INFINITY;
  for (double th : {0.25, 0.5, 0.75, 1.0}) {
    const auto r = simulate(cfg, PolicyField::constant(th), u);
    const double m = wave.mean_utility - r.mean_utility +
                     3.0 * std::hypot(wave.std_error, r.std_error);
    margin = std::min(margin, m);
    o.require(m >= 0.0, fmt("(b) constant(%g) beats wave by %.3g", th, -m));
  }
  // (c) bit-identical across thread counts
  auto small = cfg;
  small.n_paths = 20000;
  small.n_steps = 200;
  const auto r1 = simulate(small, pol, u, 1), r4 = simulate(small, pol, u, 4);
  o.require(r1.mean_utility == r4.mean_utility && r1.std_error == r4.std_error &&
                r1.terminal_mean == r4.terminal_mean &&
                r1.terminal_variance == r4.terminal_variance,
            "(c) results differ across thread counts");
  if (o.pass) o.detail = fmt("max |z| %.2f, min 3-sigma margin %.3g", worst_z, margin);
  return o;
}

// 10. Positive speeds and monotone profiles.
Outcome structure() {
  Outcome o;
  oracle::Draws d(1010);
  double min_c = INFINITY;
  for (int variant = 0; variant < 2; ++variant) {
    int admissible = 0, draws = 0;
    while (admissible < 200 && draws < 10000) {
      ++draws;
      const double omega = d.uniform(0.2, 4.0);
      const auto p = variant == 0 ? ModelParams::simple(omega) : ModelParams::quadratic_drift(omega);
      double hi = d.uniform(1.05, 6.0), lo = d.uniform(0.05, 0.95);
      const bool swap = d.uniform(0.0, 1.0) < 0.5;
      const double vl = swap ? lo : hi, vr = swap ? hi : lo;
      const auto spec = chord_spec(p, vl, vr);
      if (!check_connection(spec).ok()) continue;
      ++admissible;
      min_c = std::min(min_c, spec.c);
      o.require(spec.c > 0.0, fmt("c=%.3g at (%.3g, %.3g)", spec.c, vl, vr));
      const double ref = variant == 0 ? oracle::simple_speed(omega, vl, vr)
                                      : oracle::quadratic_drift_speed(omega, vl, vr);
      o.require(std::abs(spec.c - ref) <= 1e-12 * std::max(1.0, std::abs(ref)), "c vs oracle");
      if (admissible % 20 == 0) keep(integrate_profile(spec));
    }
    o.require(admissible == 200, fmt("only %g admissible pairs", admissible));
  }
  // increasing General wave and a decreasing one
  const auto pg = ModelParams::general(1.0, 0.0, 0.0, 1.5);
  keep(integrate_profile(compute_wave_spec(pg, 1.0, 10.0 / 3.0)));
  keep(integrate_profile(compute_wave_spec(ModelParams::general(1.0, 0.0, 0.0, 2.5), 2.0, 0.8)));
  int non_monotone = 0;
  for (const auto& prof : g_profiles) non_monotone += !strictly_monotone(prof);
  o.require(non_monotone == 0, fmt("%g of %g profiles not monotone", non_monotone,
                                   double(g_profiles.size())));
  if (o.pass)
    o.detail = fmt("min c %.3g over 400 pairs, %g monotone profiles", min_c,
                   double(g_profiles.size()));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "closure continuity at phi=1", 1.0, closure_continuity},
      {2, "simple model roots", 1.0, simple_roots},
      {3, "general example A", 1.0, general_example_a},
      {4, "general example B", 1.0, general_example_b},
      {5, "profile identity residual", 5.0, profile_identity},
      {6, "PDE translation and grid convergence", 120.0, pde_translation},
      {7, "maximum-principle bounds", 60.0, max_principle},
      {8, "Riccati round trip", 5.0, riccati_round_trip},
      {9, "Monte Carlo policy checks", 180.0, monte_carlo},
      {10, "positive speed and monotone profiles", 30.0, structure},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      out.pass = false;
      out.detail += fmt(" (over budget %.0f s)", c.budget_s);
    }
    failures += !out.pass;
    std::printf("%s %2d %s: %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
