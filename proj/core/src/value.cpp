#include "twave/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twave/errors.hpp"

namespace twave {

namespace {

// Integrand of log V_x in terms of phi.
double log_marginal_rate(const ModelParams& p, double phi) {
  return p.variant == Variant::QuadraticDrift ? 1.0 - p.omega * phi : -p.omega * phi;
}

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> f) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  }
  return out;
}

// Cell [x_k, x_k+1] holding x0; the last cell when x0 is the right end.
std::size_t anchor_cell(std::span<const double> x, double x0) {
  auto it = std::upper_bound(x.begin(), x.end(), x0);
  std::size_t k = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  return std::min(k, x.size() - 2);
}

// Cumulative integral evaluated at x0 with the integrand linearly
// interpolated on the enclosing cell, i.e. a trapezoid on [x_k, x0].
double cumulative_at(std::span<const double> x, std::span<const double> f,
                     const std::vector<double>& cum, double x0, double f0) {
  const auto k = anchor_cell(x, x0);
  return cum[k] + 0.5 * (x0 - x[k]) * (f[k] + f0);
}

double interp(std::span<const double> x, std::span<const double> f, double x0) {
  const auto k = anchor_cell(x, x0);
  const double w = (x0 - x[k]) / (x[k + 1] - x[k]);
  return (1.0 - w) * f[k] + w * f[k + 1];
}

}  // namespace

ValueCurve marginal_from_phi(std::span<const double> x, std::span<const double> phi,
                             const ModelParams& params, double x0) {
  params.validate();
  if (x.size() != phi.size() || x.size() < 2) {
    raise(ErrorKind::Precondition, "x and phi must have equal length >= 2");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) raise(ErrorKind::Precondition, "x grid must be strictly increasing");
  }
  if (!(x0 >= x.front() && x0 <= x.back())) {
    raise(ErrorKind::Precondition, "x0 must lie inside the grid");
  }
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] > 0.0) || !std::isfinite(phi[i])) {
      raise(ErrorKind::Domain, "phi must be positive; sample " + std::to_string(i) + " is " +
                                   std::to_string(phi[i]));
    }
  }

  std::vector<double> rate(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rate[i] = log_marginal_rate(params, phi[i]);
  const auto log_vx = cumulative_trapezoid(x, rate);
  const double rate0 = interp(x, rate, x0);
  const double log_vx0 = cumulative_at(x, rate, log_vx, x0, rate0);

  ValueCurve curve;
  curve.x0 = x0;
  curve.x.assign(x.begin(), x.end());
  curve.Vx.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) curve.Vx[i] = std::exp(log_vx[i] - log_vx0);

  // Accumulate V outward from x0 so that V stays small near the anchor even
  // when V_x spans many orders of magnitude across the grid.
  const auto k = anchor_cell(x, x0);
  curve.V.resize(x.size());
  double acc = 0.5 * (x[k + 1] - x0) * (1.0 + curve.Vx[k + 1]);
  curve.V[k + 1] = acc;
  for (std::size_t i = k + 2; i < x.size(); ++i) {
    acc += 0.5 * (x[i] - x[i - 1]) * (curve.Vx[i] + curve.Vx[i - 1]);
    curve.V[i] = acc;
  }
  acc = -0.5 * (x0 - x[k]) * (1.0 + curve.Vx[k]);
  curve.V[k] = acc;
  for (std::size_t i = k; i-- > 0;) {
    acc -= 0.5 * (x[i + 1] - x[i]) * (curve.Vx[i + 1] + curve.Vx[i]);
    curve.V[i] = acc;
  }
  return curve;
}

std::vector<double> phi_from_curve(const ValueCurve& curve, const ModelParams& params) {
  const auto& x = curve.x;
  std::vector<double> out;
  if (x.size() < 3) return out;
  std::vector<double> log_vx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(curve.Vx[i] > 0.0) || !std::isfinite(curve.Vx[i])) {
      raise(ErrorKind::NumericFailure, "V_x must be positive and finite to recover phi");
    }
    log_vx[i] = std::log(curve.Vx[i]);
  }
  out.reserve(x.size() - 2);
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i + 1] - x[i];
    // V_xx / V_x as the three-point derivative of log V_x.
    const double ratio = -h2 / (h1 * (h1 + h2)) * log_vx[i - 1] +
                         (h2 - h1) / (h1 * h2) * log_vx[i] + h1 / (h2 * (h1 + h2)) * log_vx[i + 1];
    out.push_back(params.variant == Variant::QuadraticDrift ? -(ratio - 1.0) / params.omega
                                                            : -ratio / params.omega);
  }
  return out;
}

ValueAssumptionReport check_value_assumptions(const ValueCurve& curve) {
  ValueAssumptionReport rep;
  rep.min_Vx = std::numeric_limits<double>::infinity();
  rep.max_second_difference = -std::numeric_limits<double>::infinity();
  for (double d : curve.Vx) rep.min_Vx = std::min(rep.min_Vx, d);
  for (std::size_t i = 1; i + 1 < curve.V.size(); ++i) {
    rep.max_second_difference =
        std::max(rep.max_second_difference, curve.V[i + 1] - 2.0 * curve.V[i] + curve.V[i - 1]);
  }
  rep.pass = rep.min_Vx > 0.0 && rep.max_second_difference < 0.0;
  return rep;
}

double UtilitySpec::operator()(double xv) const {
  if (x.size() < 2) raise(ErrorKind::Precondition, "utility grid needs at least two points");
  auto cara_tail = [](double u0, double d0, double lambda, double dx) {
    if (std::abs(lambda) < 1e-14) return u0 + d0 * dx;
    return u0 + d0 * (-std::expm1(-lambda * dx)) / lambda;
  };
  if (xv <= x.front()) return cara_tail(u.front(), u_prime.front(), tail_lambda_left, xv - x.front());
  if (xv >= x.back()) return cara_tail(u.back(), u_prime.back(), tail_lambda_right, xv - x.back());

  auto it = std::upper_bound(x.begin(), x.end(), xv);
  const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  const double h = x[k + 1] - x[k];
  const double s = (xv - x[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * u[k] + h10 * h * u_prime[k] + h01 * u[k + 1] + h11 * h * u_prime[k + 1];
}

UtilitySpec synth_terminal_utility(const WaveProfile& profile, double omega) {
  ModelParams p = profile.params;
  p.omega = omega;
  const auto curve = marginal_from_phi(profile.xi, profile.v, p, 0.0);
  const double shift = p.variant == Variant::QuadraticDrift ? 1.0 : 0.0;

  UtilitySpec us;
  us.x = curve.x;
  us.u = curve.V;
  us.u_prime = curve.Vx;
  us.lambda_lo = omega * std::min(profile.v_left, profile.v_right) - shift;
  us.lambda_hi = omega * std::max(profile.v_left, profile.v_right) - shift;
  us.tail_lambda_left = omega * profile.v.front() - shift;
  us.tail_lambda_right = omega * profile.v.back() - shift;
  return us;
}

}  // namespace twave
