#pragma once

// Noise models: quasi-static detuning and interaction fluctuations drawn per
// shot, calibrated |r> dephasing for driven Rabi damping, SPAM and loss, and
// the Monte Carlo shot harness.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "rydstab/dynamics.hpp"
#include "rydstab/system.hpp"

namespace rydstab::noise {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SpeciesNoise {
  double t2_star_us = kInfinity;   // quasi-static Gaussian dephasing; inf disables
  double rabi_tau_us = kInfinity;  // driven Rabi envelope; inf disables
  double scattering_loss = 0.0;    // per sequence
  double imaging_loss = 0.0;
  // Rabi frequency at which rabi_tau is calibrated into a dephasing rate.
  double calibration_omega_mhz = 1.0;

  // 1 - (1 - scattering)(1 - imaging).
  double background_loss() const noexcept;
};

enum class VDistribution { kUniform, kGaussian };

enum class DataDamping {
  kLindblad,       // calibrated |r> dephasing during data pulses
  kClassicalLoss,  // each data atom lost with gate_infidelity_data_2pi per shot
};

struct NoiseModel {
  SpeciesNoise ancilla{3.4, 12.0, 0.025, 0.109, 1.3};
  SpeciesNoise data{kInfinity, 22.0, 0.0, 0.026, 0.918};
  double gate_infidelity_data_2pi = 0.049;
  DataDamping data_damping = DataDamping::kLindblad;
  double v_fluctuation_fraction = 0.20;  // uniform half-width or Gaussian sigma
  VDistribution v_distribution = VDistribution::kUniform;
  double spam = 0.05;                    // data intended for |1> prepared in |0>
  double blast_infidelity = 0.0;
  double omega_gradient_per_um = 0.0;    // Omega scale 1 + g * x across the array

  // Every mechanism switched off.
  static NoiseModel none();

  // Throws InvalidArgument naming the offending field.
  void validate() const;
  const SpeciesNoise& species(system::Role role) const noexcept;
  dynamics::SurvivalModel survival_model() const noexcept;
};

// sigma_f = 1 / (sqrt(2) pi T2*): Gaussian detuning (MHz) whose ensemble
// average of cos(2 pi delta t) is exp(-(t/T2*)^2). Returns 0 for T2* = inf.
double t2star_to_sigma(double t2_star_us);

// Envelope time of a resonant Rabi oscillation of one atom of `role` under an
// |r> dephasing channel of `rate`, from a log-linear fit to the extrema of
// |P_c - 1/2| over `duration_us`. Returns inf when nothing decays.
double rabi_envelope_tau(system::Role role, double omega_mhz, double rate,
                         double duration_us);

// Bisection (in log rate) for the dephasing rate whose simulated envelope
// gives target_tau within `tolerance` (relative). Returns 0 for target inf.
double calibrate_dephasing_rate(double target_tau_us, double omega_mhz,
                                system::Role role = system::Role::kAncilla,
                                double tolerance = 0.01);

// Dephasing rate for one species under `model`; cached, deterministic.
double species_dephasing_rate(const NoiseModel& model, system::Role role);

// ----------------------------------------------------------------------------
// Per-shot draws

struct LoadingSpec {
  enum class Kind {
    kAsConfigured,  // use the system's loaded flags
    kBernoulli,     // each data site loaded independently with `probability`
    kFixedCount,    // exactly `count` data sites, uniformly random subset
  };
  Kind kind = Kind::kAsConfigured;
  double probability = 0.5;
  int count = 0;
};

// Seed of an independent stream for (seed, shot, purpose, index).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t shot, std::uint64_t purpose,
                          std::uint64_t index);

enum class Stream : std::uint64_t {
  kLoading = 1,
  kDetuning,
  kPairs,
  kSpam,
  kGateLoss,
  kMeasure,
  kTrajectory,
  kBootstrap,
};

struct ShotDraw {
  std::vector<bool> loaded;                 // per system site
  std::vector<double> detuning_offsets_mhz; // per system site
  std::vector<double> pair_scales;          // per AtomSystem::pair_index
  std::vector<bool> spam_flip;              // per system site
  std::vector<bool> gate_loss;              // per system site (classical damping)

  friend bool operator==(const ShotDraw&, const ShotDraw&) = default;
};

ShotDraw draw_shot(const NoiseModel& model, const system::AtomSystem& system,
                   const LoadingSpec& loading, std::uint64_t seed, std::uint64_t shot);

// ----------------------------------------------------------------------------
// Monte Carlo harness

struct MonteCarloConfig {
  std::int64_t shots_per_phase = 1000;
  std::uint64_t seed = 1;
  LoadingSpec loading;
  double trajectory_dt_us = 0.005;
};

struct ShotRecord {
  int phase_index = 0;
  double phase_rad = 0.0;
  std::int64_t shot = 0;
  int prepared_n1 = 0;  // loaded data atoms intended for |1>
  dynamics::MeasurementRecord measurement;
};

struct MonteCarloResult {
  std::vector<ShotRecord> records;
  std::vector<dynamics::FringeRow> summary;  // accepted shots per phase
  double ancilla_dephasing_rate = 0.0;
  double data_dephasing_rate = 0.0;
};

MonteCarloResult run_monte_carlo(const dynamics::Experiment& experiment,
                                 const std::vector<double>& phases, const NoiseModel& model,
                                 const MonteCarloConfig& config);

// Fringe table over the accepted records passing `keep`. ideal_survival_prob
// divides out the ancilla background loss.
std::vector<dynamics::FringeRow> summarize(
    const std::vector<ShotRecord>& records, const std::vector<double>& phases,
    double ancilla_background_loss,
    const std::function<bool(const ShotRecord&)>& keep = nullptr);

double binomial_stderr(double p, std::int64_t shots);

}  // namespace rydstab::noise
