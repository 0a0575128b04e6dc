#pragma once

// Fringe fitting, bootstrap errors, parity classification, contrast decay and
// contrast correction.

#include <cstdint>
#include <functional>
#include <vector>

namespace rydstab::analysis {

// One phase bin. shots = 0 marks an exact (noise-free) probability.
struct FringeSample {
  double phase_rad = 0.0;
  double probability = 0.0;
  std::int64_t shots = 0;
  std::int64_t successes = 0;

  static FringeSample exact(double phase_rad, double probability);
  static FringeSample counts(double phase_rad, std::int64_t successes, std::int64_t shots);
};

struct ParamError {
  double bootstrap = 0.0;
  double fit = 0.0;
  double total() const noexcept;  // sqrt(bootstrap^2 + fit^2)
};

// p(phi) = offset + (contrast / 2) cos(phi - phase)
struct FringeFit {
  double contrast = 0.0;
  double phase = 0.0;  // (-pi, pi]
  double offset = 0.0;
  bool phase_defined = false;
  bool at_bound = false;  // the constrained solution touches the parameter bounds
  ParamError contrast_err;
  ParamError phase_err;
  ParamError offset_err;
  double chi2 = 0.0;
  int dof = 0;

  double evaluate(double phi) const noexcept;
};

// Weighted least squares with offset in [0, 1] and contrast in
// [0, 2 min(offset, 1 - offset)]. Needs >= 4 distinct phases spanning >= pi.
FringeFit fit_fringe(const std::vector<FringeSample>& samples);

// probe.phase - ref.phase wrapped to (-pi, pi]. Throws for undefined phases.
double delta_phi(const FringeFit& ref, const FringeFit& probe);

using Fitter = std::function<FringeFit(const std::vector<FringeSample>&)>;

struct BootstrapOptions {
  int resamples = 300;
  std::uint64_t seed = 1;
  double max_failure_fraction = 0.10;
};

struct BootstrapResult {
  FringeFit fit;  // bootstrap means, xi_b from the spread, xi_f from the full-sample fit
  FringeFit full_sample;
  int resamples = 0;
  int failures = 0;
};

// Resamples every bin binomially at its own shot count, refits, and reports
// the mean (circular for the phase) and standard deviation per parameter.
// Throws NumericalError when more than max_failure_fraction of fits fail.
BootstrapResult bootstrap(const std::vector<FringeSample>& samples,
                          const BootstrapOptions& options = {}, const Fitter& fitter = fit_fringe);

// (-1)^n1.
int parity(int n1);

struct ContrastPoint {
  int n = 0;
  double contrast = 0.0;
  double error = 0.0;
};

struct ContrastDecay {
  double fidelity = 0.0;  // per-qubit factor f in C0 f^n
  double fidelity_err = 0.0;
  double c0 = 0.0;
  double c0_err = 0.0;
};

// Weighted fit of log C = log C0 + n log f (weights from the point errors,
// uniform when every error is zero). Needs >= 3 points with positive contrast.
ContrastDecay contrast_decay_fit(const std::vector<ContrastPoint>& points);

struct CorrectedValue {
  double value = 0.0;
  bool clipped = false;
};

// 0.5 + (raw - 0.5) / reference, clipped to [0, 1].
std::vector<CorrectedValue> correct_contrast(const std::vector<double>& raw, double reference);
// Inverse map of correct_contrast for unclipped values.
std::vector<double> uncorrect_contrast(const std::vector<double>& corrected, double reference);

struct OperatingPoint {
  double phase = 0.0;
  // max over orientation of (min of one sector - max of the other).
  double gap = 0.0;
  // Gap between the unweighted sector-mean fringes at `phase`.
  double mean_gap = 0.0;
  bool even_high = true;  // even sector survives more at `phase`
  bool separated = false; // gap > 0
};

// Dense grid search (1e-3 rad) for the phase with the widest worst-case gap.
OperatingPoint operating_point(const std::vector<FringeFit>& even, const std::vector<FringeFit>& odd,
                               double grid_step = 1e-3);

struct ParityObservation {
  int n_loaded = 0;
  int n1 = 0;
  bool ancilla_survived = false;
};

struct ParityCell {
  int n_loaded = 0;
  int n1 = 0;
  std::int64_t shots = 0;
  std::int64_t survivors = 0;
  double frequency = 0.0;
  double error = 0.0;  // binomial standard error
  int predicted_sign = 1;
};

struct ParitySummary {
  std::vector<ParityCell> cells;  // sorted by (n_loaded, n1)
  std::int64_t total = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
};

// Assigns +1 to a surviving ancilla when even_high (else -1) and scores the
// assignment against parity(n1).
ParitySummary parity_summary(const std::vector<ParityObservation>& observations, bool even_high);

}  // namespace rydstab::analysis
