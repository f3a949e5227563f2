#include "twave/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "twave/errors.hpp"

namespace twave {

DriftVol drift_vol(const ModelParams& params, double theta) {
  if (!(theta > 0.0) || !(theta <= ModelParams::theta_bound)) {
    raise(ErrorKind::Domain, "theta must lie in (0, 1], got " + std::to_string(theta));
  }
  switch (params.variant) {
    case Variant::Simple:
      return {params.omega * theta, theta};
    case Variant::QuadraticDrift:
      return {params.omega * theta - 0.5 * theta * theta, theta};
    case Variant::General: {
      const double var = 2.0 * (params.alpha * params.alpha + std::pow(theta, params.m) / params.m);
      return {params.beta + params.omega * theta, std::sqrt(var)};
    }
  }
  return {0.0, 0.0};
}

void SDEConfig::validate() const {
  params.validate();
  if (!(T > t0)) raise(ErrorKind::Precondition, "SDE horizon requires T > t0");
  if (n_steps < 100) raise(ErrorKind::Precondition, "n_steps must be at least 100");
  if (n_paths < 1000) raise(ErrorKind::Precondition, "n_paths must be at least 1000");
}

PolicyField PolicyField::constant(double theta) {
  if (!(theta > 0.0) || !(theta <= 1.0)) {
    raise(ErrorKind::Domain, "constant policy theta must lie in (0, 1]");
  }
  std::ostringstream tag;
  tag << "constant(" << theta << ")";
  return PolicyField(Constant{std::max(theta, kThetaFloor)}, tag.str());
}

PolicyField PolicyField::from_wave(const WaveSpec& spec, const WaveProfile& profile, double T) {
  if (profile.size() < 2) raise(ErrorKind::Precondition, "wave policy needs a sampled profile");
  Wave w{spec.params, spec.c, T, std::make_shared<const WaveProfile>(profile)};
  return PolicyField(std::move(w), "wave-optimal");
}

double PolicyField::operator()(double x, double t) const {
  if (const auto* k = std::get_if<Constant>(&impl_)) return k->theta;
  const auto& w = std::get<Wave>(impl_);
  const double v = w.profile->v_at(x + w.c * (w.T - t));
  return std::max(theta_of_phi(w.params, v), kThetaFloor);
}

PolicyProvenance PolicyField::provenance() const {
  return std::holds_alternative<Constant>(impl_) ? PolicyProvenance::Constant
                                                 : PolicyProvenance::WaveOptimal;
}

PolicyField policy_from_wave(const WaveSpec& spec, const WaveProfile& profile, double T) {
  return PolicyField::from_wave(spec, profile, T);
}

double CaraUtility::operator()(double x) const { return -std::exp(-lambda * x); }

namespace {

struct PathOutcome {
  double x_terminal;
  double utility;
};

std::mt19937_64 path_generator(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SimResult simulate(const SDEConfig& config, const PolicyField& policy,
                   const TerminalUtility& utility, int threads) {
  config.validate();
  const auto n_paths = static_cast<std::size_t>(config.n_paths);
  const double dt = (config.T - config.t0) / config.n_steps;
  const double sqrt_dt = std::sqrt(dt);

  auto evaluate = [&](double x) {
    return std::visit([x](const auto& u) { return u(x); }, utility);
  };

  std::vector<PathOutcome> outcomes(n_paths);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto gen = path_generator(config.seed, i);
      std::normal_distribution<double> normal(0.0, 1.0);
      double x = config.x0;
      for (int k = 0; k < config.n_steps; ++k) {
        const double t = config.t0 + k * dt;
        const auto dv = drift_vol(config.params, policy(x, t));
        x += dv.mu * dt + dv.sigma * sqrt_dt * normal(gen);
      }
      outcomes[i] = {x, evaluate(x)};
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1) {
    run_range(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_paths + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n_paths, b + chunk);
      if (b >= e) break;
      pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }

  SimResult res;
  res.policy_tag = policy.tag();
  res.n_paths = config.n_paths;
  double sum_u = 0.0, sum_x = 0.0;
  long used = 0;
  for (const auto& o : outcomes) {
    sum_x += o.x_terminal;
    if (!std::isfinite(o.utility)) {
      ++res.flagged_paths;
      continue;
    }
    sum_u += o.utility;
    ++used;
  }
  const double nx = static_cast<double>(n_paths);
  res.terminal_mean = sum_x / nx;
  double ss_x = 0.0, ss_u = 0.0;
  const double mean_u = used > 0 ? sum_u / static_cast<double>(used) : 0.0;
  for (const auto& o : outcomes) {
    ss_x += (o.x_terminal - res.terminal_mean) * (o.x_terminal - res.terminal_mean);
    if (std::isfinite(o.utility)) ss_u += (o.utility - mean_u) * (o.utility - mean_u);
  }
  res.terminal_variance = ss_x / (nx - 1.0);
  res.mean_utility = mean_u;
  res.std_error =
      used > 1 ? std::sqrt(ss_u / static_cast<double>(used - 1) / static_cast<double>(used)) : 0.0;
  return res;
}

double cara_constant_policy_value(const ModelParams& params, double theta, double lambda,
                                  double x0, double horizon) {
  const auto dv = drift_vol(params, theta);
  const double mean = x0 + dv.mu * horizon;
  const double var = dv.sigma * dv.sigma * horizon;
  return -std::exp(-lambda * mean + 0.5 * lambda * lambda * var);
}

}  // namespace twave
