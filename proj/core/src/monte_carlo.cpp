#include <algorithm>
#include <cmath>

#include "rydstab/error.hpp"
#include "rydstab/noise.hpp"

namespace rydstab::noise {

using dynamics::FringeRow;
using system::AtomSystem;
using system::Role;

double binomial_stderr(double p, std::int64_t shots) {
  if (shots <= 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(shots));
}

std::vector<FringeRow> summarize(const std::vector<ShotRecord>& records,
                                 const std::vector<double>& phases,
                                 double ancilla_background_loss,
                                 const std::function<bool(const ShotRecord&)>& keep) {
  std::vector<FringeRow> rows(phases.size());
  for (std::size_t k = 0; k < phases.size(); ++k) rows[k].phase_rad = phases[k];
  for (const ShotRecord& r : records) {
    if (!r.measurement.accepted) continue;
    if (keep && !keep(r)) continue;
    if (r.phase_index < 0 || r.phase_index >= static_cast<int>(rows.size())) {
      throw InvalidArgument("summarize: record phase index out of range");
    }
    FringeRow& row = rows[r.phase_index];
    ++row.shots;
    if (r.measurement.ancilla_survived) ++row.successes;
  }
  for (FringeRow& row : rows) {
    if (row.shots == 0) continue;
    row.survival_prob = static_cast<double>(row.successes) / static_cast<double>(row.shots);
    row.ideal_survival_prob =
        ancilla_background_loss < 1.0
            ? std::min(1.0, row.survival_prob / (1.0 - ancilla_background_loss))
            : 0.0;
  }
  return rows;
}

MonteCarloResult run_monte_carlo(const dynamics::Experiment& experiment,
                                 const std::vector<double>& phases, const NoiseModel& model,
                                 const MonteCarloConfig& config) {
  if (config.shots_per_phase < 1) throw InvalidArgument("run_monte_carlo: shots must be >= 1");
  if (phases.empty()) throw InvalidArgument("run_monte_carlo: empty phase grid");
  if (!experiment.sequence_for_phase) {
    throw InvalidArgument("run_monte_carlo: experiment has no sequence builder");
  }
  model.validate();

  MonteCarloResult result;
  result.ancilla_dephasing_rate = species_dephasing_rate(model, Role::kAncilla);
  result.data_dephasing_rate = model.data_damping == DataDamping::kLindblad
                                   ? species_dephasing_rate(model, Role::kData)
                                   : 0.0;

  const AtomSystem& base = experiment.system;
  const int n_sites = base.num_sites();
  const dynamics::SurvivalModel survival = model.survival_model();
  std::vector<double> rates(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    rates[i] = base.sites()[i].role == Role::kAncilla ? result.ancilla_dephasing_rate
                                                     : result.data_dephasing_rate;
  }
  const bool stochastic_evolution =
      std::any_of(rates.begin(), rates.end(), [](double r) { return r > 0.0; });

  std::vector<double> omega_scales(n_sites, 1.0);
  for (int i = 0; i < n_sites; ++i) {
    omega_scales[i] = std::max(0.0, 1.0 + model.omega_gradient_per_um * base.sites()[i].position.x_um);
  }

  result.records.reserve(phases.size() * static_cast<std::size_t>(config.shots_per_phase));
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const pulse::PulseSequence sequence = experiment.sequence_for_phase(phases[k]);
    for (std::int64_t s = 0; s < config.shots_per_phase; ++s) {
      const auto shot = static_cast<std::uint64_t>(k) * config.shots_per_phase + s;
      const ShotDraw draw = draw_shot(model, base, config.loading, config.seed, shot);

      std::vector<int> levels(n_sites);
      int prepared_n1 = 0;
      for (int i = 0; i < n_sites; ++i) {
        const system::AtomSite& a = base.sites()[i];
        levels[i] = a.initial_level;
        if (a.role != Role::kData || !draw.loaded[i]) continue;
        if (experiment.data_prep == dynamics::DataPrep::kSiteLevels &&
            a.initial_level == system::level::kOne) {
          ++prepared_n1;
          if (draw.spam_flip[i]) levels[i] = system::level::kZero;
        }
      }

      ShotRecord rec;
      rec.phase_index = static_cast<int>(k);
      rec.phase_rad = phases[k];
      rec.shot = static_cast<std::int64_t>(shot);
      rec.prepared_n1 = prepared_n1;

      const AtomSystem shot_system = base.with_loading(draw.loaded)
                                         .with_initial_levels(levels)
                                         .perturbed(draw.detuning_offsets_mhz, draw.pair_scales)
                                         .with_omega_scales(omega_scales);
      if (!shot_system.has_hilbert_space()) {
        rec.measurement.loaded.assign(n_sites, false);
        rec.measurement.survived.assign(n_sites, false);
        rec.measurement.outcome.assign(n_sites, -1);
        rec.measurement.accepted = false;
        result.records.push_back(std::move(rec));
        continue;
      }
      const qcore::QuantumState init = dynamics::initial_state(shot_system, experiment.data_prep);
      std::mt19937_64 traj_rng(
          stream_seed(config.seed, shot, static_cast<std::uint64_t>(Stream::kTrajectory), 0));
      const qcore::QuantumState final_state =
          stochastic_evolution
              ? dynamics::evolve_trajectory(init, sequence, shot_system, rates,
                                            config.trajectory_dt_us, traj_rng)
              : dynamics::evolve_unitary(init, sequence, shot_system).final_state;

      std::mt19937_64 meas_rng(
          stream_seed(config.seed, shot, static_cast<std::uint64_t>(Stream::kMeasure), 0));
      rec.measurement = dynamics::measure(final_state, shot_system, experiment.scheme,
                                          experiment.postselect_data_survival, survival, meas_rng);
      dynamics::MeasurementRecord& m = rec.measurement;
      bool gate_lost = false;
      for (int i = 0; i < n_sites; ++i) {
        if (m.loaded[i] && draw.gate_loss[i] && m.survived[i]) {
          m.survived[i] = false;
          --m.n0;
          gate_lost = true;
        }
      }
      if (gate_lost) {
        m.n1 = m.n_loaded - m.n0;
        if (experiment.postselect_data_survival) m.accepted = false;
      }
      result.records.push_back(std::move(rec));
    }
  }
  result.summary = summarize(result.records, phases, survival.ancilla_background_loss);
  return result;
}

}  // namespace rydstab::noise
