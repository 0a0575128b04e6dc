#pragma once

// Ramsey scans over the final ancilla phase in any of the three execution modes.

#include <vector>

#include "rydstab/dynamics.hpp"
#include "rydstab/noise.hpp"

namespace rydstab::dynamics {

enum class Mode { kUnitary, kLindblad, kMonteCarlo };

const char* to_string(Mode mode);

struct ScanOptions {
  Mode mode = Mode::kUnitary;
  // Unitary mode uses only the loss figures; Lindblad mode adds the
  // calibrated Rabi dephasing; Monte Carlo uses everything.
  noise::NoiseModel noise = noise::NoiseModel::none();
  noise::MonteCarloConfig monte_carlo;
};

// Exact probabilities in unitary/Lindblad mode (shots = 0), shot frequencies
// in Monte Carlo mode. Exact modes require LoadingSpec::kAsConfigured.
std::vector<FringeRow> ramsey_scan(const Experiment& experiment, const std::vector<double>& phases,
                                   const ScanOptions& options);

// Evenly spaced grid of `points` phases over [0, 2 pi).
std::vector<double> phase_grid(int points);

}  // namespace rydstab::dynamics
