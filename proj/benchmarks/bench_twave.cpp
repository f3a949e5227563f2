#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "twave/twave.hpp"

using namespace twave;

namespace {

const ModelParams kGeneral = ModelParams::general(1.0, 0.3, 0.1, 1.5);

void BM_Closures(benchmark::State& state) {
  const auto p = state.range(0) == 0 ? ModelParams::simple(1.0) : kGeneral;
  double phi = 0.37, acc = 0.0;
  for (auto _ : state) {
    const auto v = eval_closures(p, phi);
    acc += v.A + v.B_prime;
    phi = phi > 3.0 ? 0.37 : phi + 0.013;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Closures)->Arg(0)->Arg(1);

void BM_InvertA(benchmark::State& state) {
  double z = 0.05, acc = 0.0;
  for (auto _ : state) {
    acc += invert_A(kGeneral, z);
    z = z > 2.0 ? 0.05 : z + 0.01;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_InvertA);

void BM_FindRoots(benchmark::State& state) {
  const auto p = ModelParams::general(1.0, 0.0, 0.0, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(find_phi_roots(p, -0.08, 0.1, {1e-3, 1e3}));
}
BENCHMARK(BM_FindRoots);

void BM_Profile(benchmark::State& state) {
  const auto spec = compute_wave_spec(ModelParams::simple(1.0), 2.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_profile(spec));
}
BENCHMARK(BM_Profile)->Unit(benchmark::kMillisecond);

// Cost per explicit step: the horizon is fixed in steps via the CFL limit.
void BM_Evolve(benchmark::State& state) {
  const auto p = ModelParams::simple(1.0);
  const auto g = SpatialGrid::make(-20.0, 20.0, static_cast<int>(state.range(0)));
  std::vector<double> phi(g.n_cells);
  for (int i = 0; i < g.n_cells; ++i) phi[i] = 0.5 + 1.5 / (1.0 + std::exp(g.center(i)));
  EvolveOptions opt;
  opt.n_snapshots = 2;
  long steps = 0;
  for (auto _ : state) {
    const auto ev = evolve(p, phi, 0.5, g, opt);
    steps += ev.steps;
  }
  state.counters["steps"] = benchmark::Counter(static_cast<double>(steps),
                                               benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Evolve)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto p = ModelParams::simple(1.0);
  const auto spec = compute_wave_spec(p, 2.0, 0.5);
  const auto prof = integrate_profile(spec);
  const auto pol = policy_from_wave(spec, prof, 1.0);
  const auto u = synth_terminal_utility(prof, 1.0);
  SDEConfig cfg;
  cfg.params = p;
  cfg.n_paths = 10000;
  cfg.n_steps = 200;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg, pol, u, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(2)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
