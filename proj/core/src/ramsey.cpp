#include "rydstab/ramsey.hpp"

#include "rydstab/error.hpp"
#include "rydstab/units.hpp"

namespace rydstab::dynamics {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kUnitary: return "unitary";
    case Mode::kLindblad: return "lindblad";
    case Mode::kMonteCarlo: return "mc";
  }
  return "?";
}

std::vector<double> phase_grid(int points) {
  if (points < 1) throw InvalidArgument("phase_grid: need at least one point");
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) out[k] = kTwoPi * k / points;
  return out;
}

std::vector<FringeRow> ramsey_scan(const Experiment& experiment, const std::vector<double>& phases,
                                   const ScanOptions& options) {
  if (phases.empty()) throw InvalidArgument("ramsey_scan: empty phase grid");
  if (!experiment.sequence_for_phase) {
    throw InvalidArgument("ramsey_scan: experiment has no sequence builder");
  }
  if (options.mode == Mode::kMonteCarlo) {
    return noise::run_monte_carlo(experiment, phases, options.noise, options.monte_carlo).summary;
  }
  if (options.monte_carlo.loading.kind != noise::LoadingSpec::Kind::kAsConfigured) {
    throw InvalidArgument("ramsey_scan: stochastic loading needs Monte Carlo mode");
  }
  options.noise.validate();

  const system::AtomSystem& sys = experiment.system;
  const SurvivalModel survival = options.noise.survival_model();
  std::vector<CollapseChannel> channels;
  if (options.mode == Mode::kLindblad) {
    const double rate_a = noise::species_dephasing_rate(options.noise, system::Role::kAncilla);
    const double rate_d = options.noise.data_damping == noise::DataDamping::kLindblad
                              ? noise::species_dephasing_rate(options.noise, system::Role::kData)
                              : 0.0;
    for (int site : sys.loaded_sites()) {
      const double rate = sys.sites()[site].role == system::Role::kAncilla ? rate_a : rate_d;
      if (rate > 0.0) channels.push_back(CollapseChannel::rydberg_dephasing(sys, site, rate));
    }
  }

  const qcore::QuantumState init = initial_state(sys, experiment.data_prep);
  std::vector<FringeRow> rows;
  rows.reserve(phases.size());
  for (double phase : phases) {
    const pulse::PulseSequence seq = experiment.sequence_for_phase(phase);
    const qcore::QuantumState final_state =
        options.mode == Mode::kUnitary ? evolve_unitary(init, seq, sys).final_state
                                       : evolve_lindblad(init, seq, sys, channels).final_state;
    const SurvivalProbability p = ancilla_survival(final_state, sys, experiment.scheme,
                                                   experiment.postselect_data_survival, survival);
    rows.push_back({phase, p.with_background, 0, 0, p.ideal});
  }
  return rows;
}

}  // namespace rydstab::dynamics
