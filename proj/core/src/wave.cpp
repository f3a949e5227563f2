#include "twave/wave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "twave/errors.hpp"

namespace twave {

namespace {

constexpr int kBracketsPerSegment = 4096;
constexpr int kInteriorSamples = 10001;
constexpr double kRootResidualTol = 1e-10;
constexpr double kTangentTol = 1e-9;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// Geometric samples from lo to hi inclusive; both ends exact.
void append_segment(std::vector<double>& out, double lo, double hi, bool include_lo) {
  const double ratio = std::log(hi / lo);
  for (int k = include_lo ? 0 : 1; k <= kBracketsPerSegment; ++k) {
    if (k == kBracketsPerSegment) {
      out.push_back(hi);
    } else {
      out.push_back(lo * std::exp(ratio * k / kBracketsPerSegment));
    }
  }
}

double refine_root(const ModelParams& p, double c, double K0, double a, double b, double ga,
                   double gb) {
  auto g = [&](double v) { return eval_G(p, c, K0, v); };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(WaveDirection d) {
  return d == WaveDirection::Decreasing ? "decreasing" : "increasing";
}

WaveSpec chord_spec(const ModelParams& params, double v_left, double v_right) {
  params.validate();
  if (!(v_left > 0.0) || !(v_right > 0.0) || !std::isfinite(v_left) ||
      !std::isfinite(v_right)) {
    raise(ErrorKind::InvalidLimits, "limits must be positive and finite, got v_left=" +
                                        fmt(v_left) + ", v_right=" + fmt(v_right));
  }
  const bool decreasing = v_right <= 1.0 && v_left > 1.0;
  const bool increasing = v_left <= 1.0 && v_right > 1.0;
  if (!decreasing && !increasing) {
    raise(ErrorKind::InvalidLimits,
          "limits must lie on opposite sides of 1 (0 < v_right <= 1 < v_left for a decreasing "
          "wave, 0 < v_left <= 1 < v_right for an increasing wave), got v_left=" +
              fmt(v_left) + ", v_right=" + fmt(v_right));
  }

  WaveSpec s;
  s.params = params;
  s.v_left = v_left;
  s.v_right = v_right;
  const auto left = eval_closures(params, v_left);
  const auto right = eval_closures(params, v_right);
  s.c = (right.B - left.B) / (v_right - v_left);
  s.K0 = left.B - s.c * v_left;
  s.z_left = left.A;
  s.z_right = right.A;
  s.slope_left = (s.c - left.B_prime) / left.A_prime;
  s.slope_right = (s.c - right.B_prime) / right.A_prime;
  s.direction = decreasing ? WaveDirection::Decreasing : WaveDirection::Increasing;
  return s;
}

WaveSpec compute_wave_spec(const ModelParams& params, double v_left, double v_right) {
  WaveSpec s = chord_spec(params, v_left, v_right);
  validate_connection(s);
  return s;
}

SimpleZRoots analytic_z_roots_simple(double omega, double c, double K0) {
  if (!(omega > 0.0)) raise(ErrorKind::Precondition, "omega must be positive");
  if (!(c > 0.0) || !(K0 + c < 0.0)) {
    raise(ErrorKind::Precondition,
          "closed-form roots need c > 0 and K0 + c < 0, got c=" + fmt(c) + ", K0=" + fmt(K0));
  }
  const double disc = c * c / (omega * omega) - 2.0 * (c + K0) / omega;
  if (disc < 0.0) raise(ErrorKind::NoWave, "negative discriminant in the closed-form roots");
  SimpleZRoots r;
  r.z_minus = 1.0 + c / (2.0 * K0);
  r.z_plus = 0.5 - c / (2.0 * omega) - 0.5 * std::sqrt(disc);
  if (!(0.0 < r.z_plus && r.z_plus < 0.5 && 0.5 < r.z_minus && r.z_minus < 1.0)) {
    raise(ErrorKind::NoWave, "roots violate 0 < z+ < 1/2 < z- < 1: z+=" + fmt(r.z_plus) +
                                 ", z-=" + fmt(r.z_minus));
  }
  return r;
}

std::vector<RootInfo> find_phi_roots(const ModelParams& params, double c, double K0,
                                     Interval search) {
  params.validate();
  if (!(search.lo > 0.0) || !(search.hi > search.lo) || !std::isfinite(search.hi)) {
    raise(ErrorKind::Precondition, "root search interval must satisfy 0 < lo < hi < inf");
  }

  // Branch-aware grid: v = 1 is always a sample so no bracket straddles the
  // junction of the closures.
  std::vector<double> vs;
  vs.reserve(2 * kBracketsPerSegment + 2);
  if (search.lo < 1.0 && search.hi > 1.0) {
    append_segment(vs, search.lo, 1.0, true);
    append_segment(vs, 1.0, search.hi, false);
  } else {
    append_segment(vs, search.lo, search.hi, true);
  }
  std::vector<double> gs(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) gs[i] = eval_G(params, c, K0, vs[i]);

  std::vector<double> roots;
  std::vector<bool> tangential;
  const std::size_t n = vs.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (i > 0 && gs[i] == 0.0) {
      roots.push_back(vs[i]);
      tangential.push_back(false);
      continue;
    }
    if (gs[i] != 0.0 && gs[i + 1] != 0.0 && (gs[i] < 0.0) != (gs[i + 1] < 0.0)) {
      double r = refine_root(params, c, K0, vs[i], vs[i + 1], gs[i], gs[i + 1]);
      // A root at the junction must land on the constrained branch.
      if ((vs[i] == 1.0 || vs[i + 1] == 1.0) && std::abs(r - 1.0) < 1e-14) r = 1.0;
      roots.push_back(r);
      tangential.push_back(false);
    }
  }
  // Touching roots: local minima of |G| without a sign change.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = gs[i - 1], b = gs[i], d = gs[i + 1];
    if (b == 0.0 || sign_of(a) != sign_of(b) || sign_of(d) != sign_of(b)) continue;
    if (std::abs(b) > std::abs(a) || std::abs(b) > std::abs(d)) continue;
    const int s = sign_of(b);
    auto f = [&](double v) { return s * eval_G(params, c, K0, v); };
    const auto [vmin, gmin] = boost::math::tools::brent_find_minima(f, vs[i - 1], vs[i + 1], 50);
    const double scale = 1.0 + std::abs(K0) + std::abs(c * vmin);
    if (gmin <= 1e-12 * scale) {
      roots.push_back(vmin);
      tangential.push_back(true);
    }
  }

  std::vector<std::size_t> order(roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return roots[a] < roots[b]; });

  std::vector<RootInfo> out;
  for (auto idx : order) {
    const double v = roots[idx];
    if (!out.empty() && std::abs(v - out.back().v) <= 1e-7 * std::max(1.0, v)) {
      // Two sign changes this close are a tangency split by rounding.
      out.back().v = 0.5 * (out.back().v + v);
      out.back().degenerate = true;
      out.back().g_prime_sign = 0;
      continue;
    }
    RootInfo r{v, 0, static_cast<bool>(tangential[idx])};
    const double gp = eval_G_prime(params, c, K0, v);
    if (!r.degenerate && std::abs(gp) <= kTangentTol) r.degenerate = true;
    r.g_prime_sign = r.degenerate ? 0 : sign_of(gp);
    out.push_back(r);
  }
  return out;
}

double secant_threshold(const ModelParams& params, double v_minus) {
  params.validate();
  if (params.variant != Variant::General || params.alpha != 0.0 || params.beta != 0.0 ||
      !(params.m > 1.0 && params.m < 2.0)) {
    raise(ErrorKind::Precondition,
          "secant threshold requires the General model with alpha = beta = 0 and 1 < m < 2");
  }
  const double v_lower = 0.5 * params.m;
  if (!(v_minus > v_lower && v_minus < 1.0)) {
    raise(ErrorKind::Precondition, "secant threshold requires m/2 < v_minus < 1, got v_minus=" +
                                       fmt(v_minus) + " with m/2=" + fmt(v_lower));
  }
  const auto at = eval_closures(params, v_minus);
  auto gap = [&](double w) { return eval_B(params, w) - at.B - at.B_prime * (w - v_minus); };
  // gap(1) < 0 by strict concavity below 1; gap -> +inf because B is bounded
  // above 1 while the tangent line has negative slope.
  const double lo = 1.0;
  double hi = 2.0;
  while (gap(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e12) raise(ErrorKind::NumericFailure, "secant threshold: no sign change found");
  }
  const double glo = gap(lo);
  if (glo >= 0.0) raise(ErrorKind::NumericFailure, "secant threshold: gap(1) is not negative");
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(gap, lo, hi, glo, gap(hi), tol, iters);
  return 0.5 * (a + b);
}

ConnectionReport check_connection(const WaveSpec& spec) {
  const auto& p = spec.params;
  ConnectionReport rep;
  const bool decreasing = spec.direction == WaveDirection::Decreasing;

  const double gl = eval_G(p, spec.c, spec.K0, spec.v_left);
  const double gr = eval_G(p, spec.c, spec.K0, spec.v_right);
  rep.max_endpoint_residual = std::max(std::abs(gl), std::abs(gr));
  rep.limits_are_roots = rep.max_endpoint_residual <= kRootResidualTol;

  rep.endpoint_slopes_ok = spec.slope_left > kTangentTol && spec.slope_right < -kTangentTol;

  const double v_lo = std::min(spec.v_left, spec.v_right);
  const double v_hi = std::max(spec.v_left, spec.v_right);
  const double shrink = 1e-9 * (v_hi - v_lo);
  rep.interior_roots = find_phi_roots(p, spec.c, spec.K0, {v_lo + shrink, v_hi - shrink});
  rep.no_interior_roots = rep.interior_roots.empty();

  const double z_lo = std::min(spec.z_left, spec.z_right);
  const double z_hi = std::max(spec.z_left, spec.z_right);
  const int want = decreasing ? -1 : 1;
  rep.interior_sign_ok = true;
  double closest = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kInteriorSamples; ++k) {
    const double z = z_lo + (z_hi - z_lo) * k / (kInteriorSamples + 1);
    const double f = eval_F(p, spec.c, spec.K0, z);
    if (std::abs(f) < std::abs(closest)) closest = f;
    if (sign_of(f) != want) rep.interior_sign_ok = false;
  }
  rep.interior_extreme = closest;

  if (!rep.limits_are_roots) {
    rep.violation = "limits are not roots of G (max |G| = " + fmt(rep.max_endpoint_residual) + ")";
  } else if (!rep.endpoint_slopes_ok) {
    rep.violation = "endpoint stability violated: need F'(z_left) > 0 > F'(z_right), got F'(z_left)=" +
                    fmt(spec.slope_left) + ", F'(z_right)=" + fmt(spec.slope_right);
  } else if (!rep.no_interior_roots) {
    rep.violation = "F has a root strictly between the limits at v=" +
                    fmt(rep.interior_roots.front().v);
  } else if (!rep.interior_sign_ok) {
    rep.violation = std::string("F must be ") + (decreasing ? "negative" : "positive") +
                    " between the limits for a " + std::string(to_string(spec.direction)) +
                    " wave";
  }
  return rep;
}

void validate_connection(const WaveSpec& spec) {
  const auto rep = check_connection(spec);
  if (!rep.ok()) raise(ErrorKind::NoWave, "no traveling wave: " + rep.violation);
}

double WaveProfile::v_at(double x) const {
  if (xi.empty()) raise(ErrorKind::Precondition, "empty profile");
  if (x < xi.front()) return v_left;
  if (x > xi.back()) return v_right;
  const double h = spacing();
  if (h <= 0.0) return v.front();
  auto i = static_cast<std::size_t>((x - xi.front()) / h);
  if (i >= xi.size() - 1) i = xi.size() - 2;
  const double w = (x - xi[i]) / h;
  return (1.0 - w) * v[i] + w * v[i + 1];
}

std::size_t WaveProfile::origin_index() const {
  const double h = spacing();
  if (h <= 0.0) return 0;
  return static_cast<std::size_t>(std::lround(-xi.front() / h));
}

namespace {

namespace odeint = boost::numeric::odeint;
using OdeState = std::array<double, 1>;

struct Half {
  std::vector<double> z;
  bool converged = false;
  bool underflow = false;
};

// Samples z at xi = h, 2h, ... of z' = direction * F(z).
Half integrate_half(const WaveSpec& spec, double z0, double target, double sign, double eps,
                    double xi_max, const StepControl& ctl) {
  const auto& p = spec.params;
  const double sup = A_range_sup(p);
  auto rhs = [&](const OdeState& s, OdeState& ds, double /*xi*/) {
    if (!(s[0] > 0.0) || !(s[0] < sup)) {
      raise(ErrorKind::NumericFailure, "profile integration left the range of A at z=" + fmt(s[0]));
    }
    ds[0] = sign * eval_F(p, spec.c, spec.K0, s[0]);
  };
  const double h = ctl.output_step;
  auto stepper = odeint::make_dense_output(ctl.abs_tol, ctl.rel_tol, 50.0 * h,
                                           odeint::runge_kutta_dopri5<OdeState>());
  Half out;
  stepper.initialize(OdeState{z0}, 0.0, h);
  OdeState s{};
  for (long k = 1;; ++k) {
    const double t = static_cast<double>(k) * h;
    if (t > xi_max) break;
    try {
      while (stepper.current_time() < t) stepper.do_step(rhs);
    } catch (const odeint::step_adjustment_error&) {
      out.underflow = true;
      break;
    }
    stepper.calc_state(t, s);
    out.z.push_back(s[0]);
    if (std::abs(s[0] - target) < eps) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

WaveProfile integrate_profile(const WaveSpec& spec, double eps_trunc, double xi_max,
                              const StepControl& control) {
  if (!(eps_trunc > 0.0) || !(xi_max > 0.0) || !(control.output_step > 0.0)) {
    raise(ErrorKind::Precondition, "eps_trunc, xi_max and output_step must be positive");
  }
  validate_connection(spec);
  const auto& p = spec.params;
  const double z0 = control.start_level.value_or(0.5 * (spec.z_left + spec.z_right));
  const double z_lo = std::min(spec.z_left, spec.z_right);
  const double z_hi = std::max(spec.z_left, spec.z_right);
  if (!(z0 > z_lo && z0 < z_hi)) {
    raise(ErrorKind::Precondition, "start level must lie strictly between the z-limits");
  }
  const int dir = spec.direction == WaveDirection::Decreasing ? -1 : 1;
  if (sign_of(eval_F(p, spec.c, spec.K0, z0)) != dir) {
    raise(ErrorKind::NoWave, "F has the wrong sign at the start level");
  }

  const Half fwd = integrate_half(spec, z0, spec.z_right, 1.0, eps_trunc, xi_max, control);
  const Half bwd = integrate_half(spec, z0, spec.z_left, -1.0, eps_trunc, xi_max, control);

  WaveProfile prof;
  prof.params = p;
  prof.v_left = spec.v_left;
  prof.v_right = spec.v_right;
  prof.eps_trunc = eps_trunc;
  prof.xi_max = xi_max;
  prof.left_converged = bwd.converged;
  prof.right_converged = fwd.converged;
  prof.underflow_truncated = fwd.underflow || bwd.underflow;

  const double h = control.output_step;
  const std::size_t n = bwd.z.size() + 1 + fwd.z.size();
  prof.xi.reserve(n);
  prof.z.reserve(n);
  const auto nb = static_cast<long>(bwd.z.size());
  for (long k = nb; k >= 1; --k) {
    prof.xi.push_back(-static_cast<double>(k) * h);
    prof.z.push_back(bwd.z[static_cast<std::size_t>(k - 1)]);
  }
  prof.xi.push_back(0.0);
  prof.z.push_back(z0);
  for (std::size_t k = 0; k < fwd.z.size(); ++k) {
    prof.xi.push_back(static_cast<double>(k + 1) * h);
    prof.z.push_back(fwd.z[k]);
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dz = prof.z[i + 1] - prof.z[i];
    if (sign_of(dz) != dir) {
      raise(ErrorKind::NumericFailure, "non-monotone profile step at xi=" + fmt(prof.xi[i]));
    }
  }
  prof.v.resize(n);
  prof.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    prof.v[i] = invert_A(p, prof.z[i]);
    prof.theta[i] = theta_of_phi(p, prof.v[i]);
  }
  return prof;
}

}  // namespace twave
