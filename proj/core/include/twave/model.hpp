#pragma once

// Closures of the constrained HJB problem after the Riccati transformation.
//
// The transformed variable phi = -(1/omega) V_xx / V_x solves
//
//     d_t phi + d_xx A(phi) + d_x B(phi) = 0,
//
// with piecewise A, B split at phi = 1 (control at its bound for phi <= 1,
// interior optimum above). Three model variants are supported:
//
//   Simple          dX = omega*theta dt + theta dW
//   QuadraticDrift  dX = (omega*theta - theta^2/2) dt + theta dW
//   General         dX = (beta + omega*theta) dt + sqrt(2(alpha^2 + theta^m/m)) dW
//
// All functions here are pure and thread-safe.

#include <string>
#include <string_view>

namespace twave {

enum class Variant { Simple, QuadraticDrift, General };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct ModelParams {
  Variant variant = Variant::Simple;
  double omega = 1.0;
  double alpha = 0.0;  // General only
  double beta = 0.0;   // General only
  double m = 2.0;      // General only, m > 1
  static constexpr double theta_bound = 1.0;

  static ModelParams simple(double omega);
  static ModelParams quadratic_drift(double omega);
  static ModelParams general(double omega, double alpha, double beta, double m);

  /// Throws Error(Precondition) unless omega > 0 (and m > 1 for General).
  void validate() const;
};

enum class ClosureBranch { AtOrBelowOne, AboveOne };

/// phi = 1 belongs to the constrained (lower) branch.
inline ClosureBranch branch_of(double phi) {
  return phi <= 1.0 ? ClosureBranch::AtOrBelowOne : ClosureBranch::AboveOne;
}

/// A, A', B, B' at one point. For QuadraticDrift, B is the shifted flux B + A.
struct ClosureValues {
  double A;
  double A_prime;
  double B;
  double B_prime;
};

/// Evaluates all four closures with a single power evaluation. Hot path of
/// the PDE stepper; phi is checked for positivity only.
ClosureValues eval_closures(const ModelParams& p, double phi);

double eval_A(const ModelParams& p, double phi);
double eval_A_prime(const ModelParams& p, double phi);
double eval_B(const ModelParams& p, double phi);
double eval_B_prime(const ModelParams& p, double phi);

/// Supremum of the range of A: 1 when alpha == 0 (and for Simple and
/// QuadraticDrift), +infinity otherwise. The infimum is always 0.
double A_range_sup(const ModelParams& p);

/// Unique phi > 0 with A(phi) = z. Throws Error(Domain) outside the range.
double invert_A(const ModelParams& p, double z);

/// Phase function of the traveling-wave ODE in the v variable:
/// G(v) = K0 + c v - B(v).
double eval_G(const ModelParams& p, double c, double K0, double v);
double eval_G_prime(const ModelParams& p, double c, double K0, double v);

/// Phase function in the z = A(v) variable: F(z) = G(A^{-1}(z)).
double eval_F(const ModelParams& p, double c, double K0, double z);
/// F'(z) = G'(v) / A'(v) with v = A^{-1}(z).
double eval_F_prime(const ModelParams& p, double c, double K0, double z);

/// Optimal response: min(1, 1/phi), or min(1, phi^{-1/(m-1)}) for General.
double theta_of_phi(const ModelParams& p, double phi);

}  // namespace twave
