#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using twave::cli::RunConfig;

namespace {

constexpr const char* kOutputDirEnv = "TWAVE_OUTPUT_DIR";

// --out wins; otherwise <$TWAVE_OUTPUT_DIR>/<command>.<ext>; otherwise stdout.
fs::path output_path(const RunConfig& cfg, const char* ext) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    return fs::path(dir) / (cfg.command + ext);
  }
  return {};
}

template <class Writer>
void emit(const RunConfig& cfg, const char* ext, Writer&& write) {
  const auto path = output_path(cfg, ext);
  if (path.empty()) {
    write(std::cout);
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) twave::raise(twave::ErrorKind::Precondition, "cannot open " + path.string());
  write(f);
  std::cerr << "wrote " << path.string() << '\n';
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--variant", c.variant, "simple | quadratic-drift | general")->capture_default_str();
  app.add_option("--omega", c.omega, "drift sensitivity")->capture_default_str();
  app.add_option("--alpha", c.alpha, "General: volatility floor")->capture_default_str();
  app.add_option("--beta", c.beta, "General: drift offset")->capture_default_str();
  app.add_option("--m", c.m, "General: volatility exponent (> 1)")->capture_default_str();
  app.add_option("--v-left", c.v_left, "limit as xi -> -inf")->capture_default_str();
  app.add_option("--v-right", c.v_right, "limit as xi -> +inf")->capture_default_str();
  app.add_option("--root-lo", c.root_lo, "root search lower end")->capture_default_str();
  app.add_option("--root-hi", c.root_hi, "root search upper end")->capture_default_str();

  app.add_option("--eps-trunc", c.eps_trunc, "profile truncation tolerance")->capture_default_str();
  app.add_option("--xi-max", c.xi_max, "profile half-extent cap")->capture_default_str();
  app.add_option("--output-step", c.output_step, "profile xi spacing")->capture_default_str();

  app.add_option("--n-cells", c.n_cells, "PDE grid cells")->capture_default_str();
  app.add_option("--horizon", c.horizon_tau, "PDE horizon in tau (0 = auto)")->capture_default_str();
  app.add_option("--widths", c.widths_of_travel, "wave widths of travel for auto horizon")
      ->capture_default_str();
  app.add_option("--level", c.level, "tracked level (0 = v at xi 0)")->capture_default_str();
  app.add_option("--cfl", c.cfl_safety, "CFL safety factor")->capture_default_str();
  app.add_option("--flux", c.flux, "auto | centered | upwind")->capture_default_str();
  app.add_option("--snapshots", c.n_snapshots, "snapshots for the speed fit")->capture_default_str();

  app.add_option("--x0", c.x0, "initial state")->capture_default_str();
  app.add_option("--t0", c.t0, "initial time")->capture_default_str();
  app.add_option("--T", c.T, "terminal time")->capture_default_str();
  app.add_option("--n-steps", c.n_steps, "Euler-Maruyama steps")->capture_default_str();
  app.add_option("--n-paths", c.n_paths, "Monte Carlo paths")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads")->capture_default_str();
  app.add_option("--utility", c.utility, "wave | cara")->capture_default_str();
  app.add_option("--cara-lambda", c.cara_lambda, "CARA risk aversion")->capture_default_str();
  app.add_option("--thetas", c.constant_thetas, "constant policies to compare")
      ->capture_default_str()
      ->delimiter(',');

  app.add_option("--mode", c.sweep_mode, "sweep mode: limits | speed")->capture_default_str();
  app.add_option("--v-left-range", c.v_left_range, "lo:hi:count")->capture_default_str();
  app.add_option("--v-right-range", c.v_right_range, "lo:hi:count")->capture_default_str();
  app.add_option("--c-range", c.c_range, "lo:hi:count")->capture_default_str();
  app.add_option("--k0-range", c.k0_range, "lo:hi:count")->capture_default_str();

  app.add_option("--out", c.out, "output file (default: stdout or $TWAVE_OUTPUT_DIR)");
}

int run(const RunConfig& cfg) {
  if (cfg.command == "spec") {
    const auto j = twave::cli::cmd_spec(cfg);
    emit(cfg, ".json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    if (!j["valid"].get<bool>()) {
      std::cerr << "no wave: " << j["violation"].get<std::string>() << '\n';
      return twave::cli::exit_code_for(twave::ErrorKind::NoWave);
    }
    return 0;
  }
  if (cfg.command == "profile") {
    emit(cfg, ".csv", [&](std::ostream& o) { twave::cli::cmd_profile(cfg, o); });
    return 0;
  }
  if (cfg.command == "verify") {
    const auto j = twave::cli::cmd_verify(cfg);
    emit(cfg, ".json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    return 0;
  }
  if (cfg.command == "simulate") {
    const auto j = twave::cli::cmd_simulate(cfg);
    emit(cfg, ".json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    return 0;
  }
  emit(cfg, ".csv", [&](std::ostream& o) { twave::cli::cmd_sweep(cfg, o); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Traveling-wave solutions of the constrained portfolio HJB closure"};
  app.set_config("--config", "", "key=value file; command-line flags override it");
  app.require_subcommand(1);
  add_options(app, cfg);

  for (const char* name : {"spec", "profile", "verify", "simulate", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("spec")->description("wave speed, constant, roots and connection verdict (JSON)");
  app.get_subcommand("profile")->description("sampled wave profile xi,z,v,theta (CSV)");
  app.get_subcommand("verify")->description("independent PDE check of the wave (JSON)");
  app.get_subcommand("simulate")->description("Monte Carlo policy comparison (JSON)");
  app.get_subcommand("sweep")->description("wave existence over a parameter grid (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(cfg);
  } catch (const twave::Error& e) {
    std::cerr << "error (" << twave::to_string(e.kind()) << "): " << e.what() << '\n';
    return twave::cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
