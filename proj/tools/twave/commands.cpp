#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace twave::cli {

using nlohmann::json;

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Range Range::parse(const std::string& text) {
  Range r;
  std::istringstream in(text);
  std::string a, b, n;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, n)) {
    raise(ErrorKind::Precondition, "range must look like lo:hi:count, got '" + text + "'");
  }
  try {
    std::size_t pos = 0;
    r.lo = std::stod(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    r.hi = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    r.count = std::stoi(n, &pos);
    if (pos != n.size()) throw std::invalid_argument(n);
  } catch (const std::logic_error&) {
    raise(ErrorKind::Precondition, "range must look like lo:hi:count, got '" + text + "'");
  }
  if (r.count < 1) raise(ErrorKind::Precondition, "range count must be >= 1");
  if (r.count > 1 && !(r.hi >= r.lo)) raise(ErrorKind::Precondition, "range needs hi >= lo");
  return r;
}

std::vector<double> Range::values() const {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

ModelParams RunConfig::params() const {
  ModelParams p;
  p.variant = parse_variant(variant);
  p.omega = omega;
  if (p.variant == Variant::General) {
    p.alpha = alpha;
    p.beta = beta;
    p.m = m;
  }
  return p;
}

namespace {

FluxScheme parse_flux(const std::string& s) {
  if (s == "auto") return FluxScheme::Auto;
  if (s == "centered" || s == "centred") return FluxScheme::Centered;
  if (s == "upwind") return FluxScheme::Upwind;
  raise(ErrorKind::Precondition, "unknown flux scheme '" + s + "'");
}

}  // namespace

void RunConfig::validate() const {
  params().validate();
  if (!std::isfinite(v_left) || !std::isfinite(v_right) || !(v_left > 0.0) || !(v_right > 0.0)) {
    raise(ErrorKind::InvalidLimits, "limits must be positive and finite");
  }
  if (!(root_lo > 0.0) || !(root_hi > root_lo)) {
    raise(ErrorKind::Precondition, "root search needs 0 < root-lo < root-hi");
  }
  if (!(eps_trunc > 0.0) || !(xi_max > 0.0) || !(output_step > 0.0)) {
    raise(ErrorKind::Precondition, "eps-trunc, xi-max and output-step must be positive");
  }
  if (n_cells < SpatialGrid::kMinCells) raise(ErrorKind::Precondition, "n-cells must be >= 64");
  if (!(cfl_safety > 0.0)) raise(ErrorKind::Precondition, "cfl must be positive");
  if (n_snapshots < 2) raise(ErrorKind::Precondition, "snapshots must be >= 2");
  if (horizon_tau < 0.0 || !(widths_of_travel > 0.0)) {
    raise(ErrorKind::Precondition, "horizon must be non-negative and widths positive");
  }
  parse_flux(flux);
  if (threads < 1) raise(ErrorKind::Precondition, "threads must be >= 1");
  if (utility != "wave" && utility != "cara") {
    raise(ErrorKind::Precondition, "utility must be 'wave' or 'cara'");
  }
  if (utility == "cara" && !(cara_lambda > 0.0)) {
    raise(ErrorKind::Precondition, "cara-lambda must be positive");
  }
  for (double th : constant_thetas) {
    if (!(th > 0.0) || !(th <= 1.0)) raise(ErrorKind::Domain, "constant thetas must lie in (0, 1]");
  }
  if (sweep_mode != "limits" && sweep_mode != "speed") {
    raise(ErrorKind::Precondition, "sweep mode must be 'limits' or 'speed'");
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain:
    case ErrorKind::InvalidLimits:
    case ErrorKind::Precondition:
      return 2;
    case ErrorKind::NoWave:
      return 3;
    case ErrorKind::NumericFailure:
    case ErrorKind::NonMonotoneField:
      return 4;
  }
  return 4;
}

namespace {

json params_json(const ModelParams& p) {
  json j{{"variant", std::string(to_string(p.variant))}, {"omega", p.omega}};
  if (p.variant == Variant::General) {
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["m"] = p.m;
  }
  return j;
}

json roots_json(const std::vector<RootInfo>& roots) {
  json arr = json::array();
  for (const auto& r : roots) {
    arr.push_back({{"v", r.v}, {"g_prime_sign", r.g_prime_sign}, {"degenerate", r.degenerate}});
  }
  return arr;
}

WaveProfile profile_for(const RunConfig& config, const WaveSpec& spec) {
  StepControl ctl;
  ctl.output_step = config.output_step;
  return integrate_profile(spec, config.eps_trunc, config.xi_max, ctl);
}

}  // namespace

json cmd_spec(const RunConfig& config) {
  config.validate();
  const auto p = config.params();
  const auto spec = chord_spec(p, config.v_left, config.v_right);
  const auto report = check_connection(spec);
  const auto roots = find_phi_roots(p, spec.c, spec.K0, {config.root_lo, config.root_hi});

  json j;
  j["model"] = params_json(p);
  j["v_left"] = spec.v_left;
  j["v_right"] = spec.v_right;
  j["c"] = spec.c;
  j["K0"] = spec.K0;
  j["z_left"] = spec.z_left;
  j["z_right"] = spec.z_right;
  j["direction"] = std::string(to_string(spec.direction));
  j["stability"] = {{"left", {{"slope", spec.slope_left}, {"sign", spec.stability_left()}}},
                    {"right", {{"slope", spec.slope_right}, {"sign", spec.stability_right()}}}};
  j["roots"] = roots_json(roots);
  j["root_search"] = {{"lo", config.root_lo}, {"hi", config.root_hi}};
  j["connection"] = {{"limits_are_roots", report.limits_are_roots},
                     {"no_interior_roots", report.no_interior_roots},
                     {"interior_sign_ok", report.interior_sign_ok},
                     {"endpoint_slopes_ok", report.endpoint_slopes_ok},
                     {"max_endpoint_residual", report.max_endpoint_residual}};
  j["valid"] = report.ok();
  j["violation"] = report.violation;
  return j;
}

void cmd_profile(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto spec = compute_wave_spec(config.params(), config.v_left, config.v_right);
  const auto prof = profile_for(config, spec);
  out << "xi,z,v,theta\n";
  for (std::size_t i = 0; i < prof.size(); ++i) {
    out << format_number(prof.xi[i]) << ',' << format_number(prof.z[i]) << ','
        << format_number(prof.v[i]) << ',' << format_number(prof.theta[i]) << '\n';
  }
}

json cmd_verify(const RunConfig& config) {
  config.validate();
  const auto spec = compute_wave_spec(config.params(), config.v_left, config.v_right);
  const auto prof = profile_for(config, spec);
  VerifyOptions opt;
  opt.n_cells = config.n_cells;
  opt.horizon_tau = config.horizon_tau;
  opt.widths_of_travel = config.widths_of_travel;
  opt.level = config.level;
  opt.evolve.cfl_safety = config.cfl_safety;
  opt.evolve.flux = parse_flux(config.flux);
  opt.evolve.n_snapshots = config.n_snapshots;
  const auto ver = verify_wave(spec, prof, opt);

  json j;
  j["model"] = params_json(spec.params);
  j["v_left"] = spec.v_left;
  j["v_right"] = spec.v_right;
  j["c_expected"] = ver.c_expected;
  j["c_measured"] = ver.speed.c_measured;
  j["speed_rel_error"] = ver.speed_rel_error;
  j["fit_residual"] = ver.speed.fit_residual;
  j["residual_max"] = ver.residual_max;
  j["max_norm_error"] = ver.max_norm_error;
  j["bounds"] = {{"pass", ver.bounds.pass},
                 {"lower", ver.bounds.lower},
                 {"upper", ver.bounds.upper},
                 {"tolerance", ver.bounds.tolerance},
                 {"observed_min", ver.bounds.observed_min},
                 {"observed_max", ver.bounds.observed_max}};
  j["grid"] = {{"x_lo", ver.grid.x_lo}, {"x_hi", ver.grid.x_hi}, {"n_cells", ver.grid.n_cells}};
  j["horizon_tau"] = ver.horizon_tau;
  j["level"] = ver.level;
  j["wave_width"] = ver.width;
  j["steps"] = ver.steps;
  return j;
}

json cmd_simulate(const RunConfig& config) {
  config.validate();
  const auto p = config.params();
  const auto spec = compute_wave_spec(p, config.v_left, config.v_right);
  const auto prof = profile_for(config, spec);

  SDEConfig sde;
  sde.params = p;
  sde.x0 = config.x0;
  sde.t0 = config.t0;
  sde.T = config.T;
  sde.n_steps = config.n_steps;
  sde.n_paths = config.n_paths;
  sde.seed = config.seed;
  sde.validate();

  TerminalUtility utility = CaraUtility{config.cara_lambda};
  if (config.utility == "wave") utility = synth_terminal_utility(prof, p.omega);

  std::vector<PolicyField> policies;
  policies.push_back(policy_from_wave(spec, prof, config.T));
  for (double th : config.constant_thetas) policies.push_back(PolicyField::constant(th));

  std::vector<SimResult> results;
  for (const auto& pol : policies) results.push_back(simulate(sde, pol, utility, config.threads));

  json j;
  j["model"] = params_json(p);
  j["v_left"] = spec.v_left;
  j["v_right"] = spec.v_right;
  j["c"] = spec.c;
  j["utility"] = config.utility;
  if (config.utility == "cara") j["cara_lambda"] = config.cara_lambda;
  j["sde"] = {{"x0", sde.x0}, {"t0", sde.t0},           {"T", sde.T},
              {"n_steps", sde.n_steps}, {"n_paths", sde.n_paths}, {"seed", sde.seed},
              {"threads", config.threads}};
  j["theta_floor"] = kThetaFloor;

  json arr = json::array();
  for (const auto& r : results) {
    arr.push_back({{"policy", r.policy_tag},
                   {"mean_utility", r.mean_utility},
                   {"std_error", r.std_error},
                   {"n_paths", r.n_paths},
                   {"flagged_paths", r.flagged_paths},
                   {"terminal_mean", r.terminal_mean},
                   {"terminal_variance", r.terminal_variance}});
  }
  j["policies"] = arr;

  json cmp = json::array();
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      const double se = std::hypot(results[a].std_error, results[b].std_error);
      const double diff = results[a].mean_utility - results[b].mean_utility;
      cmp.push_back({{"a", results[a].policy_tag},
                     {"b", results[b].policy_tag},
                     {"difference", diff},
                     {"z_score", se > 0.0 ? diff / se : 0.0}});
    }
  }
  j["comparisons"] = cmp;

  json oracle = json::array();
  if (config.utility == "cara") {
    for (std::size_t i = 0; i < config.constant_thetas.size(); ++i) {
      const auto& r = results[i + 1];
      const double exact = cara_constant_policy_value(p, config.constant_thetas[i],
                                                      config.cara_lambda, sde.x0, sde.T - sde.t0);
      oracle.push_back({{"policy", r.policy_tag},
                        {"closed_form", exact},
                        {"z_score", r.std_error > 0.0 ? (r.mean_utility - exact) / r.std_error
                                                      : 0.0}});
    }
  }
  j["closed_form"] = oracle;
  return j;
}

namespace {

struct SweepRow {
  double v_left = NAN, v_right = NAN, c = NAN, K0 = NAN;
  int root_count = 0;
  bool wave_exists = false;
  std::string status;
};

void write_row(std::ostream& out, const std::string& mode, const SweepRow& r) {
  out << mode << ',' << format_number(r.v_left) << ',' << format_number(r.v_right) << ','
      << format_number(r.c) << ',' << format_number(r.K0) << ',' << r.root_count << ','
      << (r.wave_exists ? 1 : 0) << ',' << r.status << '\n';
}

}  // namespace

void cmd_sweep(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto p = config.params();
  const Interval search{config.root_lo, config.root_hi};
  out << "mode,v_left,v_right,c,K0,root_count,wave_exists,status\n";

  if (config.sweep_mode == "limits") {
    const auto lefts = Range::parse(config.v_left_range).values();
    const auto rights = Range::parse(config.v_right_range).values();
    for (double vl : lefts) {
      for (double vr : rights) {
        SweepRow row;
        row.v_left = vl;
        row.v_right = vr;
        try {
          const auto spec = chord_spec(p, vl, vr);
          row.c = spec.c;
          row.K0 = spec.K0;
          row.root_count = static_cast<int>(find_phi_roots(p, spec.c, spec.K0, search).size());
          const auto rep = check_connection(spec);
          row.wave_exists = rep.ok();
          row.status = rep.ok() ? "ok" : "no-wave";
        } catch (const Error& e) {
          row.status = e.kind() == ErrorKind::InvalidLimits ? "invalid-limits" : "error";
        }
        write_row(out, "limits", row);
      }
    }
    return;
  }

  const auto cs = Range::parse(config.c_range).values();
  const auto ks = Range::parse(config.k0_range).values();
  for (double c : cs) {
    for (double k0 : ks) {
      SweepRow row;
      row.c = c;
      row.K0 = k0;
      row.status = "no-wave";
      try {
        const auto roots = find_phi_roots(p, c, k0, search);
        row.root_count = static_cast<int>(roots.size());
        for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
          if (!(roots[i].v <= 1.0 && roots[i + 1].v > 1.0)) continue;
          if (roots[i].degenerate || roots[i + 1].degenerate) break;
          // The root where G' > 0 is the left (unstable) end.
          const bool increasing = roots[i].g_prime_sign > 0;
          const double vl = increasing ? roots[i].v : roots[i + 1].v;
          const double vr = increasing ? roots[i + 1].v : roots[i].v;
          const auto spec = chord_spec(p, vl, vr);
          if (check_connection(spec).ok()) {
            row.v_left = vl;
            row.v_right = vr;
            row.wave_exists = true;
            row.status = "ok";
          }
          break;
        }
      } catch (const Error&) {
        row.status = "error";
      }
      write_row(out, "speed", row);
    }
  }
}

}  // namespace twave::cli
