#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "rydstab/analysis.hpp"
#include "rydstab/dynamics.hpp"
#include "rydstab/noise.hpp"
#include "rydstab/pulse.hpp"
#include "rydstab/ramsey.hpp"
#include "rydstab/spectral.hpp"
#include "rydstab/system.hpp"
#include "rydstab/units.hpp"

using namespace rydstab;
using rydstab::system::AtomSystem;

namespace {

AtomSystem plaquette(int loaded) {
  std::vector<bool> mask(4, false);
  for (int k = 0; k < loaded; ++k) mask[k] = true;
  return AtomSystem::square_plaquette(8.84, mask);
}

dynamics::Experiment readout(const AtomSystem& sys) {
  return {sys, [](double phi) {
            pulse::ReadoutSpec spec;
            spec.ramsey_phase_rad = phi;
            return pulse::build_readout_sequence(spec);
          }};
}

}  // namespace

// Diagonalize and exponentiate the full plaquette Hamiltonian.
static void BM_Propagator(benchmark::State& state) {
  const AtomSystem sys = plaquette(static_cast<int>(state.range(0)));
  system::DriveSettings drive;
  drive.ancilla = {5.0, 0.0, 0.0, true};
  drive.data = {0.95, 0.55, 0.0, true};
  const auto h = system::build_hamiltonian(sys, drive);
  for (auto _ : state) {
    qcore::SpectralPropagator prop(h);
    benchmark::DoNotOptimize(prop.unitary(0.9));
  }
  state.SetLabel("dim " + std::to_string(h.matrix().rows()));
}
BENCHMARK(BM_Propagator)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

static void BM_PlaquetteScan(benchmark::State& state) {
  const auto exp = readout(plaquette(4));
  const auto grid = dynamics::phase_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::ramsey_scan(exp, grid, {}));
}
BENCHMARK(BM_PlaquetteScan)->Arg(12)->Arg(36)->Unit(benchmark::kMillisecond);

// Full noise model, one phase, shots per iteration in the argument.
static void BM_MonteCarloShots(benchmark::State& state) {
  const auto exp = readout(plaquette(4));
  noise::MonteCarloConfig cfg;
  cfg.shots_per_phase = static_cast<int>(state.range(0));
  cfg.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(noise::run_monte_carlo(exp, {0.0}, noise::NoiseModel{}, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloShots)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_FringeFit(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<analysis::FringeSample> s;
  for (int k = 0; k < 24; ++k) {
    const double phi = kTwoPi * k / 24;
    std::binomial_distribution<int> draw(200, 0.5 + 0.3 * std::cos(phi - 0.4));
    s.push_back(analysis::FringeSample::counts(phi, draw(rng), 200));
  }
  for (auto _ : state) benchmark::DoNotOptimize(analysis::fit_fringe(s));
}
BENCHMARK(BM_FringeFit);

static void BM_Bootstrap(benchmark::State& state) {
  std::vector<analysis::FringeSample> s;
  for (int k = 0; k < 24; ++k) {
    const double phi = kTwoPi * k / 24;
    s.push_back(analysis::FringeSample::counts(phi, std::lround(200 * (0.5 + 0.3 * std::cos(phi))), 200));
  }
  analysis::BootstrapOptions opts;
  opts.resamples = 300;
  for (auto _ : state) benchmark::DoNotOptimize(analysis::bootstrap(s, opts));
}
BENCHMARK(BM_Bootstrap)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
