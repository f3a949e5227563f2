#include "twave/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "twave/errors.hpp"

namespace twave {

namespace {

void require_positive(double phi, const char* what) {
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    raise(ErrorKind::Domain,
          std::string(what) + ": argument must be positive and finite, got " +
              std::to_string(phi));
  }
}

ClosureValues simple_closures(double omega, double phi) {
  if (phi <= 1.0) {
    const double d = 1.0 - phi;
    return {0.5 * phi, 0.5, -0.5 * omega * d * d, omega * d};
  }
  return {1.0 - 0.5 / phi, 0.5 / (phi * phi), 0.0, 0.0};
}

ClosureValues general_closures(const ModelParams& p, double phi) {
  const double a2 = p.alpha * p.alpha;
  const double inv_m = 1.0 / p.m;
  const double w = p.omega;
  if (phi <= 1.0) {
    const double k = a2 + inv_m;
    return {k * phi, k, (p.beta + w) * phi - w * k * phi * phi - w * (p.m - 1.0) * inv_m,
            p.beta + w - 2.0 * w * k * phi};
  }
  // r = phi^{-1/(m-1)}; phi^{(m-2)/(m-1)} = phi * r and phi^{-m/(m-1)} = r / phi.
  const double r = std::pow(phi, -1.0 / (p.m - 1.0));
  const double q = (p.m - 1.0) * inv_m;
  return {1.0 - q * r + a2 * phi,
          inv_m * r / phi + a2,
          p.beta * phi - w * a2 * phi * phi + q * w * (phi * r - 1.0),
          p.beta - 2.0 * w * a2 * phi + w * (p.m - 2.0) * inv_m * r};
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Simple: return "simple";
    case Variant::QuadraticDrift: return "quadratic-drift";
    case Variant::General: return "general";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "simple") return Variant::Simple;
  if (name == "quadratic-drift" || name == "quadratic") return Variant::QuadraticDrift;
  if (name == "general") return Variant::General;
  raise(ErrorKind::Precondition, "unknown model variant '" + std::string(name) + "'");
}

ModelParams ModelParams::simple(double omega) {
  ModelParams p{Variant::Simple, omega, 0.0, 0.0, 2.0};
  p.validate();
  return p;
}

ModelParams ModelParams::quadratic_drift(double omega) {
  ModelParams p{Variant::QuadraticDrift, omega, 0.0, 0.0, 2.0};
  p.validate();
  return p;
}

ModelParams ModelParams::general(double omega, double alpha, double beta, double m) {
  ModelParams p{Variant::General, omega, alpha, beta, m};
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    raise(ErrorKind::Precondition, "omega must be positive, got " + std::to_string(omega));
  }
  if (variant == Variant::General) {
    if (!(m > 1.0) || !std::isfinite(m)) {
      raise(ErrorKind::Precondition, "m must exceed 1, got " + std::to_string(m));
    }
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
      raise(ErrorKind::Precondition, "alpha and beta must be finite");
    }
  }
}

ClosureValues eval_closures(const ModelParams& p, double phi) {
  require_positive(phi, "closure");
  switch (p.variant) {
    case Variant::Simple:
      return simple_closures(p.omega, phi);
    case Variant::QuadraticDrift: {
      auto s = simple_closures(p.omega, phi);
      s.B += s.A;
      s.B_prime += s.A_prime;
      return s;
    }
    case Variant::General:
      return general_closures(p, phi);
  }
  return {};
}

double eval_A(const ModelParams& p, double phi) { return eval_closures(p, phi).A; }
double eval_A_prime(const ModelParams& p, double phi) { return eval_closures(p, phi).A_prime; }
double eval_B(const ModelParams& p, double phi) { return eval_closures(p, phi).B; }
double eval_B_prime(const ModelParams& p, double phi) { return eval_closures(p, phi).B_prime; }

double A_range_sup(const ModelParams& p) {
  if (p.variant == Variant::General && p.alpha != 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0;
}

double invert_A(const ModelParams& p, double z) {
  if (!(z > 0.0) || !(z < A_range_sup(p))) {
    raise(ErrorKind::Domain, "invert_A: z = " + std::to_string(z) + " outside the range of A");
  }
  if (p.variant != Variant::General) {
    return z <= 0.5 ? 2.0 * z : 0.5 / (1.0 - z);
  }
  const double a2 = p.alpha * p.alpha;
  const double k = a2 + 1.0 / p.m;
  if (z <= k) return z / k;
  if (a2 == 0.0) {
    // 1 - ((m-1)/m) phi^{-1/(m-1)} = z
    const double r = (1.0 - z) * p.m / (p.m - 1.0);
    return std::pow(r, -(p.m - 1.0));
  }
  // A is strictly increasing: grow a bracket [1, hi] then bracketed Newton.
  double hi = 2.0;
  while (eval_A(p, hi) < z) {
    hi *= 2.0;
    if (!std::isfinite(hi)) raise(ErrorKind::NumericFailure, "invert_A: bracket overflow");
  }
  auto f = [&](double phi) {
    const auto cl = eval_closures(p, phi);
    return std::make_pair(cl.A - z, cl.A_prime);
  };
  std::uintmax_t iters = 200;
  const double guess = 0.5 * (1.0 + hi);
  const double phi = boost::math::tools::newton_raphson_iterate(f, guess, 1.0, hi, 50, iters);
  if (iters >= 200) raise(ErrorKind::NumericFailure, "invert_A: Newton iteration did not converge");
  return phi;
}

double eval_G(const ModelParams& p, double c, double K0, double v) {
  return K0 + c * v - eval_B(p, v);
}

double eval_G_prime(const ModelParams& p, double c, double /*K0*/, double v) {
  return c - eval_B_prime(p, v);
}

double eval_F(const ModelParams& p, double c, double K0, double z) {
  return eval_G(p, c, K0, invert_A(p, z));
}

double eval_F_prime(const ModelParams& p, double c, double /*K0*/, double z) {
  const auto cl = eval_closures(p, invert_A(p, z));
  return (c - cl.B_prime) / cl.A_prime;
}

double theta_of_phi(const ModelParams& p, double phi) {
  require_positive(phi, "theta_of_phi");
  if (phi <= 1.0) return 1.0;
  if (p.variant == Variant::General) return std::pow(phi, -1.0 / (p.m - 1.0));
  return 1.0 / phi;
}

}  // namespace twave
