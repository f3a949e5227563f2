#pragma once

// Explicit finite-volume evolution of the closure PDE in backward time
// tau = T - t:
//
//     d_tau phi = d_xx A(phi) + d_x B(phi),
//
// used to verify traveling waves independently of the ODE construction.

#include <span>
#include <vector>

#include "twave/model.hpp"
#include "twave/wave.hpp"

namespace twave {

/// Uniform cell-centred grid; cell i covers [x_lo + i dx, x_lo + (i+1) dx].
struct SpatialGrid {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n_cells = 64;

  static constexpr int kMinCells = 64;

  /// Throws Error(Precondition) unless x_hi > x_lo and n_cells >= 64.
  static SpatialGrid make(double x_lo, double x_hi, int n_cells);

  double dx() const { return (x_hi - x_lo) / n_cells; }
  double center(int i) const { return x_lo + (i + 0.5) * dx(); }
  std::vector<double> centers() const;
};

enum class FluxScheme {
  Centered,
  Upwind,
  Auto  // centred unless the face Peclet number |B'| dx / A' exceeds 2
};

struct EvolveOptions {
  double cfl_safety = 0.45;
  FluxScheme flux = FluxScheme::Auto;
  int n_snapshots = 101;  // uniformly spaced in tau, including 0 and the horizon
};

struct FieldEvolution {
  SpatialGrid grid;
  std::vector<double> tau;
  std::vector<std::vector<double>> snapshots;
  double cfl_used = 0.0;
  long steps = 0;
  long upwind_faces = 0;  // face updates that fell back to upwinding
};

/// Throws Error(NumericFailure) on a detected CFL violation (a new extremum
/// more than 1e-6 beyond the previous bounds) or a non-positive value.
FieldEvolution evolve(const ModelParams& params, std::span<const double> initial_phi,
                      double horizon_tau, const SpatialGrid& grid,
                      const EvolveOptions& options = {});

struct SpeedEstimate {
  double c_measured = 0.0;
  double fit_residual = 0.0;       // RMS deviation of crossings from the fitted line
  std::vector<double> crossings;   // level crossing position per snapshot
};

/// Least-squares speed of a level crossing. The crossing moves as
/// x*(tau) = x*(0) - c tau, so c_measured = -slope. Throws
/// Error(NonMonotoneField) unless every snapshot crosses the level exactly once.
SpeedEstimate estimate_speed(const FieldEvolution& evolution, double level);

struct BoundsReport {
  bool pass = false;
  double lower = 0.0;
  double upper = 0.0;
  double tolerance = 0.0;
  double observed_min = 0.0;
  double observed_max = 0.0;
};

/// Every snapshot must stay in [lambda_lo/omega - tol, lambda_hi/omega + tol]
/// with tol = 1e-6 + 10 dx^2.
BoundsReport check_bounds(const FieldEvolution& evolution, double lambda_lo, double lambda_hi,
                          double omega);

/// max |Q(xi) - K0| with Q = -c v + dA(v)/dxi + B(v), where dA(v)/dxi is the
/// second-order finite difference of the sampled z (independent of F).
double residual_constant(const WaveProfile& profile, const WaveSpec& spec);

/// v(x + shift) sampled at the grid centres, clamped to the limits outside
/// the profile.
std::vector<double> sample_profile(const WaveProfile& profile, const SpatialGrid& grid,
                                   double shift = 0.0);

/// xi-distance between the points where v has covered 10% and 90% of the
/// transition between its limits.
double wave_width(const WaveProfile& profile);

struct VerifyOptions {
  int n_cells = 2048;
  double horizon_tau = 0.0;     // 0: long enough for 10 wave widths of travel
  double widths_of_travel = 10.0;
  double level = 0.0;           // 0: v at xi = 0
  EvolveOptions evolve;
};

struct WaveVerification {
  SpatialGrid grid;
  double horizon_tau = 0.0;
  double level = 0.0;
  double width = 0.0;
  double c_expected = 0.0;
  SpeedEstimate speed;
  double speed_rel_error = 0.0;
  double residual_max = 0.0;
  double max_norm_error = 0.0;  // final field vs v(x + c tau)
  BoundsReport bounds;
  long steps = 0;
};

/// Evolves the sampled profile on a grid padded so both boundaries stay in
/// the flat tails for the whole horizon, then measures speed, residual,
/// bounds and the max-norm deviation from the exact translate.
WaveVerification verify_wave(const WaveSpec& spec, const WaveProfile& profile,
                             const VerifyOptions& options = {});

}  // namespace twave
