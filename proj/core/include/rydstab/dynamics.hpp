#pragma once

// Executes pulse sequences on an AtomSystem: unitary, Lindblad and stochastic
// trajectory evolution, plus the terminal measurement/loss model.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "rydstab/pulse.hpp"
#include "rydstab/qcore.hpp"
#include "rydstab/system.hpp"

namespace rydstab::dynamics {

struct EvolutionResult {
  qcore::QuantumState final_state;
  // State after each segment when tracing was requested.
  std::vector<qcore::QuantumState> trace;
  double total_duration_us = 0.0;
};

system::DriveSettings drive_settings(const pulse::PulseSegment& segment);

// Ideal rotation exp(-i angle/2 (cos phi X - sin phi Y)) on the coupled/Rydberg
// pair of every loaded atom of the target species. Same axis convention as a
// drive segment of the same phase.
qcore::Operator instant_rotation(const system::AtomSystem& system, pulse::Target target,
                                 double angle_rad, double phase_rad);

EvolutionResult evolve_unitary(const qcore::QuantumState& initial,
                               const pulse::PulseSequence& sequence,
                               const system::AtomSystem& system, bool record_trace = false);

struct CollapseChannel {
  qcore::Matrix op;  // single-site operator
  double rate = 0.0; // 1/us
  int site = 0;      // system site
  // Species whose drive switches the channel on; nullopt means always on.
  std::optional<pulse::Target> active_during;

  // sqrt(rate) |r><r| on `site`. With only_while_driven the channel is active
  // only during drive segments addressing the site's species.
  static CollapseChannel rydberg_dephasing(const system::AtomSystem& system, int site, double rate,
                                           bool only_while_driven = true);
};

struct LindbladOptions {
  // 0 picks min(1 / (100 f), duration / 20) per segment, f bounding the
  // generator in MHz. Segments without active channels are propagated exactly.
  double max_step_us = 0.0;
  double trace_tolerance = 1e-6;
  bool record_trace = false;
};

// Fixed-step RK4 integration of the master equation segment by segment.
// Throws NumericalError when the trace drifts beyond tolerance.
EvolutionResult evolve_lindblad(const qcore::QuantumState& initial,
                                const pulse::PulseSequence& sequence,
                                const system::AtomSystem& system,
                                const std::vector<CollapseChannel>& channels,
                                const LindbladOptions& options = {});

// Pure-state trajectory with |r> dephasing unravelled as random phase kicks
// exp(-i sqrt(rate dt) xi), xi ~ N(0, 1), after each step of at most dt_us.
// The ensemble average equals the Lindblad evolution with the same channels.
// rates are per system site and follow CollapseChannel's activity rule.
qcore::QuantumState evolve_trajectory(const qcore::QuantumState& initial,
                                      const pulse::PulseSequence& sequence,
                                      const system::AtomSystem& system,
                                      const std::vector<double>& dephasing_rate_per_site,
                                      double dt_us, std::mt19937_64& rng);

// ----------------------------------------------------------------------------
// Measurement

enum class MeasurementScheme {
  kRydbergLoss,  // data |r> lost
  kBlastOne,     // data |1> pushed out, |r> survives
  kBoth,         // data |1> and |r> lost
};

const char* to_string(MeasurementScheme scheme);

// The ancilla is always read out through Rydberg anti-trapping (|r> lost).
struct SurvivalModel {
  double ancilla_background_loss = 0.0;
  double data_background_loss = 0.0;
  double blast_infidelity = 0.0;  // chance that a data |1> survives the blast
};

// Survival probability of one atom found in `level`, before background loss.
double level_survival(const system::AtomSystem& system, int site, int level,
                      MeasurementScheme scheme, const SurvivalModel& model);

struct MeasurementRecord {
  bool ancilla_loaded = false;
  bool ancilla_survived = false;
  std::vector<bool> loaded;    // per system site
  std::vector<bool> survived;  // per system site, false when unloaded
  std::vector<int> outcome;    // sampled level per system site, -1 when unloaded
  int n_loaded = 0;            // loaded data atoms
  int n0 = 0;                  // surviving data atoms
  int n1 = 0;                  // n_loaded - n0
  bool accepted = true;        // false when postselection discarded the shot
};

MeasurementRecord measure(const qcore::QuantumState& state, const system::AtomSystem& system,
                          MeasurementScheme scheme, bool postselect_data_survival,
                          const SurvivalModel& model, std::mt19937_64& rng);

struct SurvivalProbability {
  double ideal = 0.0;            // no background loss on the ancilla
  double with_background = 0.0;  // ideal * (1 - ancilla background loss)
  double acceptance = 1.0;       // probability the shot passes postselection
};

// Exact ancilla survival probability, conditioned on data survival when
// postselecting. Data background loss is independent of the quantum outcome
// and cancels in the conditional.
SurvivalProbability ancilla_survival(const qcore::QuantumState& state,
                                     const system::AtomSystem& system, MeasurementScheme scheme,
                                     bool postselect_data_survival,
                                     const SurvivalModel& model = {});

// ----------------------------------------------------------------------------
// Experiments

enum class DataPrep {
  kSiteLevels,  // each data atom starts in its AtomSite::initial_level
  kPlus,        // (|0> + |1>) / sqrt(2)
};

struct Experiment {
  system::AtomSystem system;
  std::function<pulse::PulseSequence(double ramsey_phase_rad)> sequence_for_phase;
  DataPrep data_prep = DataPrep::kSiteLevels;
  MeasurementScheme scheme = MeasurementScheme::kRydbergLoss;
  bool postselect_data_survival = true;
};

// Ancilla in |g>, data per `prep`, over the loaded atoms of `system`.
qcore::QuantumState initial_state(const system::AtomSystem& system, DataPrep prep);

struct FringeRow {
  double phase_rad = 0.0;
  double survival_prob = 0.0;  // with background loss (Monte Carlo: observed frequency)
  std::int64_t shots = 0;      // 0 for exact modes
  std::int64_t successes = 0;
  double ideal_survival_prob = 0.0;
};

}  // namespace rydstab::dynamics
