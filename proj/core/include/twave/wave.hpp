#pragma once

// Traveling waves phi(x, t) = v(x + c (T - t)) of the closure PDE.
//
// Substituting the ansatz and integrating once gives
//
//     -c v + d/dxi A(v) + B(v) = K0,
//
// so z = A(v) solves the scalar ODE z' = F(z) = G(A^{-1}(z)) with
// G(v) = K0 + c v - B(v). A monotone wave is a heteroclinic orbit of this
// ODE between two roots of G on opposite sides of v = 1.

#include <optional>
#include <string>
#include <vector>

#include "twave/model.hpp"

namespace twave {

enum class WaveDirection { Decreasing, Increasing };

std::string_view to_string(WaveDirection d);

struct WaveSpec {
  ModelParams params;
  double v_left = 0.0;   // limit as xi -> -infinity
  double v_right = 0.0;  // limit as xi -> +infinity
  double c = 0.0;
  double K0 = 0.0;
  double z_left = 0.0;   // A(v_left)
  double z_right = 0.0;  // A(v_right)
  double slope_left = 0.0;   // F'(z_left), must be > 0
  double slope_right = 0.0;  // F'(z_right), must be < 0
  WaveDirection direction = WaveDirection::Decreasing;

  int stability_left() const { return slope_left > 0.0 ? 1 : (slope_left < 0.0 ? -1 : 0); }
  int stability_right() const { return slope_right > 0.0 ? 1 : (slope_right < 0.0 ? -1 : 0); }
};

/// Chord construction without the connection check: c is the slope of the
/// chord of B between the limits, K0 = B(v_left) - c v_left. One limit must
/// be <= 1 and the other > 1 (phi = 1 sits on the constrained branch).
WaveSpec chord_spec(const ModelParams& params, double v_left, double v_right);

/// chord_spec followed by validate_connection.
WaveSpec compute_wave_spec(const ModelParams& params, double v_left, double v_right);

struct SimpleZRoots {
  double z_plus;   // stable end, 0 < z_plus < 1/2
  double z_minus;  // unstable end, 1/2 < z_minus < 1
};

/// Closed-form roots of F for the Simple model with c > 0, K0 + c < 0.
SimpleZRoots analytic_z_roots_simple(double omega, double c, double K0);

struct Interval {
  double lo;
  double hi;
};

struct RootInfo {
  double v;
  int g_prime_sign;  // sign of G'(v); 0 only for degenerate roots
  bool degenerate;   // tangential (double) root
};

/// All roots of G on the open interval, in ascending order.
std::vector<RootInfo> find_phi_roots(const ModelParams& params, double c, double K0,
                                     Interval search);

/// Root > 1 of B(w) - B(v_minus) = B'(v_minus) (w - v_minus), the threshold
/// that the right limit of an increasing wave must exceed. Requires General
/// with alpha = beta = 0, 1 < m < 2 and m/2 < v_minus < 1.
double secant_threshold(const ModelParams& params, double v_minus);

struct ConnectionReport {
  bool limits_are_roots = false;
  bool no_interior_roots = false;
  bool interior_sign_ok = false;
  bool endpoint_slopes_ok = false;
  double max_endpoint_residual = 0.0;  // max |G(v_left)|, |G(v_right)|
  double interior_extreme = 0.0;       // F sample closest to zero, signed
  std::vector<RootInfo> interior_roots;
  std::string violation;  // empty when ok()

  bool ok() const {
    return limits_are_roots && no_interior_roots && interior_sign_ok && endpoint_slopes_ok;
  }
};

/// Non-throwing connection check: limits are roots, no root of F strictly
/// between the z-images, interior sign of F matches the direction, and
/// F'(z_left) > 0 > F'(z_right).
ConnectionReport check_connection(const WaveSpec& spec);

/// Throws Error(NoWave) naming the first violated condition.
void validate_connection(const WaveSpec& spec);

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double output_step = 1e-3;         // uniform xi spacing of the samples
  std::optional<double> start_level;  // z(0); midpoint of the z-interval if unset
};

struct WaveProfile {
  ModelParams params;
  double v_left = 0.0;
  double v_right = 0.0;
  std::vector<double> xi;  // ascending, uniform
  std::vector<double> z;
  std::vector<double> v;
  std::vector<double> theta;
  double eps_trunc = 0.0;
  double xi_max = 0.0;
  bool left_converged = false;   // |z - z_left| < eps_trunc reached
  bool right_converged = false;  // |z - z_right| < eps_trunc reached
  bool underflow_truncated = false;

  std::size_t size() const { return xi.size(); }
  double spacing() const { return xi.size() > 1 ? xi[1] - xi[0] : 0.0; }

  /// Linear interpolation of v, clamped to the limits outside the grid.
  double v_at(double x) const;
  /// Index of the sample at xi = 0.
  std::size_t origin_index() const;
};

/// Integrates z' = F(z) forward and backward from z(0) with adaptive
/// Dormand-Prince steps, sampling on a uniform xi grid until each end is
/// within eps_trunc of its limit or |xi| > xi_max.
WaveProfile integrate_profile(const WaveSpec& spec, double eps_trunc = 1e-8,
                              double xi_max = 200.0, const StepControl& control = {});

}  // namespace twave
