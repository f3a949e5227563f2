#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twave/twave.hpp"

namespace twave::cli {

/// Inclusive linear range "lo:hi:count".
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  static Range parse(const std::string& text);
  std::vector<double> values() const;
};

struct RunConfig {
  std::string command;

  std::string variant = "simple";
  double omega = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double m = 2.0;
  double v_left = 2.0;
  double v_right = 0.5;
  double root_lo = 1e-3;
  double root_hi = 1e3;

  // profile
  double eps_trunc = 1e-8;
  double xi_max = 200.0;
  double output_step = 1e-3;

  // verify
  int n_cells = 2048;
  double horizon_tau = 0.0;
  double widths_of_travel = 10.0;
  double level = 0.0;
  double cfl_safety = 0.45;
  std::string flux = "auto";
  int n_snapshots = 101;

  // simulate
  double x0 = 0.0;
  double t0 = 0.0;
  double T = 1.0;
  int n_steps = 1000;
  long n_paths = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string utility = "wave";
  double cara_lambda = 1.0;
  std::vector<double> constant_thetas{0.25, 0.5, 0.75, 1.0};

  // sweep
  std::string sweep_mode = "limits";
  std::string v_left_range = "1.5:3:4";
  std::string v_right_range = "0.2:0.8:4";
  std::string c_range = "-0.12:-0.06:7";
  std::string k0_range = "0.1:0.1:1";

  std::string out;

  ModelParams params() const;
  /// Throws Error(Precondition) on values the modules would reject.
  void validate() const;
};

/// Process exit code for an error kind: 2 invalid input, 3 no wave,
/// 4 numeric failure.
int exit_code_for(ErrorKind kind);

nlohmann::json cmd_spec(const RunConfig& config);
void cmd_profile(const RunConfig& config, std::ostream& out);
nlohmann::json cmd_verify(const RunConfig& config);
nlohmann::json cmd_simulate(const RunConfig& config);
void cmd_sweep(const RunConfig& config, std::ostream& out);

/// printf("%.17g").
std::string format_number(double x);

}  // namespace twave::cli
