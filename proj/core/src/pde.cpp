#include "twave/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twave/errors.hpp"

namespace twave {

SpatialGrid SpatialGrid::make(double x_lo, double x_hi, int n_cells) {
  if (!(x_hi > x_lo) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
    raise(ErrorKind::Precondition, "grid requires x_hi > x_lo");
  }
  if (n_cells < kMinCells) {
    raise(ErrorKind::Precondition, "grid requires at least 64 cells, got " + std::to_string(n_cells));
  }
  return {x_lo, x_hi, n_cells};
}

std::vector<double> SpatialGrid::centers() const {
  std::vector<double> x(static_cast<std::size_t>(n_cells));
  for (int i = 0; i < n_cells; ++i) x[static_cast<std::size_t>(i)] = center(i);
  return x;
}

namespace {

struct Extent {
  double lo;
  double hi;
};

Extent extent_of(std::span<const double> u) {
  const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
  return {*mn, *mx};
}

}  // namespace

FieldEvolution evolve(const ModelParams& params, std::span<const double> initial_phi,
                      double horizon_tau, const SpatialGrid& grid, const EvolveOptions& options) {
  params.validate();
  const auto n = static_cast<std::size_t>(grid.n_cells);
  if (initial_phi.size() != n) {
    raise(ErrorKind::Precondition, "initial field size does not match the grid");
  }
  if (!(horizon_tau > 0.0)) raise(ErrorKind::Precondition, "horizon_tau must be positive");
  if (!(options.cfl_safety > 0.0)) raise(ErrorKind::Precondition, "cfl_safety must be positive");
  if (options.n_snapshots < 2) raise(ErrorKind::Precondition, "need at least two snapshots");
  for (double v : initial_phi) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      raise(ErrorKind::Domain, "initial field must be positive and finite");
    }
  }

  const double dx = grid.dx();
  FieldEvolution ev;
  ev.grid = grid;
  ev.cfl_used = options.cfl_safety;

  std::vector<double> phi(initial_phi.begin(), initial_phi.end());
  std::vector<double> next(n);
  std::vector<double> A(n), Ap(n), B(n), Bp(n);
  // Face i sits between cells i-1 and i; faces 0 and n are the boundaries.
  std::vector<double> flux(n + 1);

  const int n_snap = options.n_snapshots;
  ev.tau.reserve(static_cast<std::size_t>(n_snap));
  ev.snapshots.reserve(static_cast<std::size_t>(n_snap));
  ev.tau.push_back(0.0);
  ev.snapshots.push_back(phi);

  Extent bounds = extent_of(phi);
  double tau = 0.0;
  for (int snap = 1; snap < n_snap; ++snap) {
    const double tau_target = horizon_tau * snap / (n_snap - 1);
    while (tau < tau_target) {
      double max_ap = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto cl = eval_closures(params, phi[i]);
        A[i] = cl.A;
        Ap[i] = cl.A_prime;
        B[i] = cl.B;
        Bp[i] = cl.B_prime;
        max_ap = std::max(max_ap, cl.A_prime);
      }
      double dt = options.cfl_safety * dx * dx / (2.0 * max_ap);
      if (tau + dt >= tau_target) dt = tau_target - tau;

      // Zero-gradient boundaries: ghost cells mirror the edge cells, so the
      // diffusive flux vanishes and the convective flux is B at the edge.
      flux[0] = B[0];
      flux[n] = B[n - 1];
      for (std::size_t f = 1; f < n; ++f) {
        const std::size_t l = f - 1, r = f;
        const double diffusive = (A[r] - A[l]) / dx;
        bool upwind = options.flux == FluxScheme::Upwind;
        if (options.flux == FluxScheme::Auto) {
          const double a = 0.5 * (Ap[l] + Ap[r]);
          const double b = 0.5 * (std::abs(Bp[l]) + std::abs(Bp[r]));
          upwind = b * dx > 2.0 * a;
        }
        double convective;
        if (upwind) {
          ++ev.upwind_faces;
          // d_tau phi = B'(phi) d_x phi: information flows toward -B'.
          const double speed = 0.5 * (Bp[l] + Bp[r]);
          convective = speed >= 0.0 ? B[r] : B[l];
        } else {
          convective = 0.5 * (B[l] + B[r]);
        }
        flux[f] = diffusive + convective;
      }

      const double ratio = dt / dx;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = phi[i] + ratio * (flux[i + 1] - flux[i]);
        next[i] = u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
      }
      if (!(lo > 0.0)) {
        raise(ErrorKind::NumericFailure,
              "evolve: non-positive value produced at tau=" + std::to_string(tau + dt));
      }
      if (hi > bounds.hi + 1e-6 || lo < bounds.lo - 1e-6 || !std::isfinite(hi)) {
        raise(ErrorKind::NumericFailure,
              "evolve: CFL violation detected at tau=" + std::to_string(tau + dt) +
                  " (new extremum outside [" + std::to_string(bounds.lo) + ", " +
                  std::to_string(bounds.hi) + "]); reduce cfl_safety");
      }
      bounds = {lo, hi};
      phi.swap(next);
      tau += dt;
      ++ev.steps;
    }
    ev.tau.push_back(tau_target);
    ev.snapshots.push_back(phi);
  }
  return ev;
}

SpeedEstimate estimate_speed(const FieldEvolution& evolution, double level) {
  const auto& grid = evolution.grid;
  SpeedEstimate est;
  for (std::size_t s = 0; s < evolution.snapshots.size(); ++s) {
    const auto& u = evolution.snapshots[s];
    int count = 0;
    double where = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      const double a = u[i] - level;
      const double b = u[i + 1] - level;
      if (a == 0.0) {
        ++count;
        where = grid.center(static_cast<int>(i));
      } else if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
        ++count;
        const double w = a / (a - b);
        where = grid.center(static_cast<int>(i)) + w * grid.dx();
      }
    }
    if (u.back() == level) {
      ++count;
      where = grid.center(grid.n_cells - 1);
    }
    if (count != 1) {
      raise(ErrorKind::NonMonotoneField,
            "snapshot " + std::to_string(s) + " crosses level " + std::to_string(level) + " " +
                std::to_string(count) + " times; expected exactly one");
    }
    est.crossings.push_back(where);
  }

  const auto& t = evolution.tau;
  const double m = static_cast<double>(t.size());
  double st = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sx += est.crossings[i];
  }
  const double tm = st / m, xm = sx / m;
  double stt = 0.0, stx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    stx += (t[i] - tm) * (est.crossings[i] - xm);
  }
  if (!(stt > 0.0)) raise(ErrorKind::Precondition, "need snapshots at distinct times");
  const double slope = stx / stt;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = est.crossings[i] - (xm + slope * (t[i] - tm));
    ss += r * r;
  }
  est.c_measured = -slope;
  est.fit_residual = std::sqrt(ss / m);
  return est;
}

BoundsReport check_bounds(const FieldEvolution& evolution, double lambda_lo, double lambda_hi,
                          double omega) {
  BoundsReport rep;
  const double dx = evolution.grid.dx();
  rep.lower = lambda_lo / omega;
  rep.upper = lambda_hi / omega;
  rep.tolerance = 1e-6 + 10.0 * dx * dx;
  rep.observed_min = std::numeric_limits<double>::infinity();
  rep.observed_max = -rep.observed_min;
  for (const auto& u : evolution.snapshots) {
    const auto e = extent_of(u);
    rep.observed_min = std::min(rep.observed_min, e.lo);
    rep.observed_max = std::max(rep.observed_max, e.hi);
  }
  rep.pass = rep.observed_min >= rep.lower - rep.tolerance &&
             rep.observed_max <= rep.upper + rep.tolerance;
  return rep;
}

double residual_constant(const WaveProfile& profile, const WaveSpec& spec) {
  const std::size_t n = profile.size();
  if (n == 0) return 0.0;
  const auto& p = spec.params;
  const auto& z = profile.z;
  const auto& xi = profile.xi;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dz = 0.0;
    if (n >= 3) {
      if (i == 0) {
        const double h = xi[1] - xi[0];
        dz = (-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * h);
      } else if (i == n - 1) {
        const double h = xi[n - 1] - xi[n - 2];
        dz = (3.0 * z[n - 1] - 4.0 * z[n - 2] + z[n - 3]) / (2.0 * h);
      } else {
        dz = (z[i + 1] - z[i - 1]) / (xi[i + 1] - xi[i - 1]);
      }
    }
    const double v = profile.v[i];
    const double q = -spec.c * v + dz + eval_B(p, v);
    worst = std::max(worst, std::abs(q - spec.K0));
  }
  return worst;
}

std::vector<double> sample_profile(const WaveProfile& profile, const SpatialGrid& grid,
                                   double shift) {
  std::vector<double> out(static_cast<std::size_t>(grid.n_cells));
  for (int i = 0; i < grid.n_cells; ++i) {
    out[static_cast<std::size_t>(i)] = profile.v_at(grid.center(i) + shift);
  }
  return out;
}

double wave_width(const WaveProfile& profile) {
  const double a = profile.v_left;
  const double b = profile.v_right;
  auto crossing = [&](double frac) {
    const double level = a + frac * (b - a);
    for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
      const double u = profile.v[i] - level;
      const double w = profile.v[i + 1] - level;
      if (u == 0.0) return profile.xi[i];
      if ((u < 0.0) != (w < 0.0)) return profile.xi[i] + u / (u - w) * profile.spacing();
    }
    raise(ErrorKind::Precondition, "profile does not cover the transition");
  };
  return std::abs(crossing(0.9) - crossing(0.1));
}

WaveVerification verify_wave(const WaveSpec& spec, const WaveProfile& profile,
                             const VerifyOptions& options) {
  if (profile.size() < 3) raise(ErrorKind::Precondition, "profile has too few samples");
  WaveVerification out;
  out.c_expected = spec.c;
  out.width = wave_width(profile);
  out.horizon_tau = options.horizon_tau > 0.0
                        ? options.horizon_tau
                        : options.widths_of_travel * out.width / std::abs(spec.c);
  out.level = options.level > 0.0 ? options.level : profile.v[profile.origin_index()];

  // phi(x, tau) = v(x + c tau): the layer moves by -c tau. Keep the whole
  // truncated profile inside the domain at both ends of the horizon.
  const double travel = -spec.c * out.horizon_tau;
  const double lo = std::min(profile.xi.front(), profile.xi.front() + travel);
  const double hi = std::max(profile.xi.back(), profile.xi.back() + travel);
  out.grid = SpatialGrid::make(lo, hi, options.n_cells);

  const auto initial = sample_profile(profile, out.grid);
  const auto ev = evolve(spec.params, initial, out.horizon_tau, out.grid, options.evolve);
  out.steps = ev.steps;
  out.speed = estimate_speed(ev, out.level);
  out.speed_rel_error = std::abs(out.speed.c_measured - spec.c) / std::abs(spec.c);
  out.residual_max = residual_constant(profile, spec);

  const double w = spec.params.omega;
  out.bounds = check_bounds(ev, w * std::min(spec.v_left, spec.v_right),
                            w * std::max(spec.v_left, spec.v_right), w);

  const auto exact = sample_profile(profile, out.grid, spec.c * out.horizon_tau);
  const auto& last = ev.snapshots.back();
  for (std::size_t i = 0; i < last.size(); ++i) {
    out.max_norm_error = std::max(out.max_norm_error, std::abs(last[i] - exact[i]));
  }
  return out;
}

}  // namespace twave
