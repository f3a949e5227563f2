#pragma once

// Monte Carlo evaluation of control policies for dX = mu(theta) dt + sigma(theta) dW.

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "twave/model.hpp"
#include "twave/value.hpp"
#include "twave/wave.hpp"

namespace twave {

/// Controls are clamped from below to keep sigma > 0 in the General model.
inline constexpr double kThetaFloor = 1e-6;

struct DriftVol {
  double mu;
  double sigma;
};

/// Variant drift and volatility for 0 < theta <= 1; Error(Domain) otherwise.
DriftVol drift_vol(const ModelParams& params, double theta);

struct SDEConfig {
  ModelParams params;
  double x0 = 0.0;
  double t0 = 0.0;
  double T = 1.0;
  int n_steps = 1000;
  long n_paths = 100000;
  std::uint64_t seed = 1;

  /// T > t0, n_steps >= 100, n_paths >= 1000.
  void validate() const;
};

enum class PolicyProvenance { Constant, WaveOptimal };

/// Feedback control (x, t) -> theta in [kThetaFloor, 1].
class PolicyField {
 public:
  static PolicyField constant(double theta);
  /// theta*(x, t) = theta_of_phi(v(x + c (T - t))), v linearly interpolated
  /// on the profile and held at the limits outside it.
  static PolicyField from_wave(const WaveSpec& spec, const WaveProfile& profile, double T);

  double operator()(double x, double t) const;
  PolicyProvenance provenance() const;
  const std::string& tag() const { return tag_; }

 private:
  struct Constant {
    double theta;
  };
  struct Wave {
    ModelParams params;
    double c;
    double T;
    std::shared_ptr<const WaveProfile> profile;
  };

  PolicyField(std::variant<Constant, Wave> impl, std::string tag)
      : impl_(std::move(impl)), tag_(std::move(tag)) {}

  std::variant<Constant, Wave> impl_;
  std::string tag_;
};

PolicyField policy_from_wave(const WaveSpec& spec, const WaveProfile& profile, double T);

/// u(x) = -exp(-lambda x).
struct CaraUtility {
  double lambda;
  double operator()(double x) const;
};

using TerminalUtility = std::variant<CaraUtility, UtilitySpec>;

struct SimResult {
  std::string policy_tag;
  double mean_utility = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
  long flagged_paths = 0;  // paths whose utility was not finite; excluded
  double terminal_mean = 0.0;
  double terminal_variance = 0.0;
};

/// Euler-Maruyama with n_steps uniform steps. Path i draws from its own
/// generator seeded by (seed, i) and results are reduced in path order, so
/// the output is bit-identical for any thread count.
SimResult simulate(const SDEConfig& config, const PolicyField& policy,
                   const TerminalUtility& utility, int threads = 1);

/// Closed form E[-exp(-lambda X_T)] for a constant control, where X_T is
/// Gaussian with mean x0 + mu (T - t0) and variance sigma^2 (T - t0).
double cara_constant_policy_value(const ModelParams& params, double theta, double lambda,
                                  double x0, double horizon);

}  // namespace twave
