#pragma once

// Inversion of the Riccati transformation at a fixed time slice.
//
// phi = -(1/omega) V_xx / V_x fixes V_x up to a positive factor; curves here
// are normalised by V_x(x0) = 1 and V(x0) = 0. For the quadratic-drift
// variant the transform is phi = -(1/omega) (V_xx / V_x - 1).

#include <span>
#include <vector>

#include "twave/model.hpp"
#include "twave/wave.hpp"

namespace twave {

struct ValueCurve {
  std::vector<double> x;
  std::vector<double> Vx;  // marginal value, Vx(x0) = 1
  std::vector<double> V;   // value level, V(x0) = 0
  double x0 = 0.0;
};

/// Trapezoid reconstruction of V_x = exp(-omega int phi) and V = int V_x.
/// x must be strictly increasing with x0 inside [x.front(), x.back()].
/// Throws Error(Domain) on a non-positive phi sample.
ValueCurve marginal_from_phi(std::span<const double> x, std::span<const double> phi,
                             const ModelParams& params, double x0);

/// Recovers phi from V_xx / V_x, taken as the three-point derivative of
/// log V_x. Entry i corresponds to x[i + 1]; the two end points are omitted.
/// Exact (to rounding) for CARA curves.
std::vector<double> phi_from_curve(const ValueCurve& curve, const ModelParams& params);

struct ValueAssumptionReport {
  bool pass = false;
  double min_Vx = 0.0;
  double max_second_difference = 0.0;  // largest V[i+1] - 2V[i] + V[i-1]; must be < 0
};

/// V_x > 0 everywhere and strictly negative second differences of V.
ValueAssumptionReport check_value_assumptions(const ValueCurve& curve);

/// Terminal utility sampled on a grid, with CARA extensions outside it.
struct UtilitySpec {
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> u_prime;
  double lambda_lo = 0.0;  // strict lower bound on -u''/u'
  double lambda_hi = 0.0;  // strict upper bound on -u''/u'
  double tail_lambda_left = 0.0;   // -u''/u' used below x.front()
  double tail_lambda_right = 0.0;  // -u''/u' used above x.back()

  /// Cubic Hermite on the grid, CARA tails beyond it.
  double operator()(double xv) const;
};

/// u' = exp(-omega int v) on the profile's xi grid (x0 = 0). The risk
/// aversion bounds are omega times the profile limits (shifted by -1 for the
/// quadratic-drift variant, whose transform carries the extra V_x term).
UtilitySpec synth_terminal_utility(const WaveProfile& profile, double omega);

}  // namespace twave
