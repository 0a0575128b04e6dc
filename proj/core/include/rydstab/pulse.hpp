#pragma once

// Pulse sequences and analytic design of the interaction-compensated gate.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rydstab::pulse {

enum class Target { kAncilla, kData };

enum class SegmentKind {
  kDrive,    // square pulse on one species for `duration_us`
  kIdle,     // free evolution, no laser on
  kInstant,  // ideal zero-duration rotation by `rotation_rad` (analytic comparisons)
};

struct PulseSegment {
  SegmentKind kind = SegmentKind::kDrive;
  Target target = Target::kAncilla;
  double omega_mhz = 0.0;
  double delta_mhz = 0.0;
  double phase_rad = 0.0;
  double duration_us = 0.0;
  double rotation_rad = 0.0;

  static PulseSegment drive(Target target, double omega_mhz, double delta_mhz, double phase_rad,
                            double duration_us);
  static PulseSegment idle(double duration_us);
  static PulseSegment instant(Target target, double rotation_rad, double phase_rad);

  friend bool operator==(const PulseSegment&, const PulseSegment&) = default;
};

class PulseSequence {
 public:
  // Throws InvalidArgument for an empty list or an invalid segment.
  explicit PulseSequence(std::vector<PulseSegment> segments, std::string label = {},
                         std::optional<double> design_v_mhz = std::nullopt,
                         std::optional<int> design_n = std::nullopt);

  const std::vector<PulseSegment>& segments() const noexcept { return segments_; }
  const std::string& label() const noexcept { return label_; }
  std::optional<double> design_v_mhz() const noexcept { return design_v_; }
  std::optional<int> design_n() const noexcept { return design_n_; }
  double total_duration_us() const noexcept;

  friend bool operator==(const PulseSequence&, const PulseSequence&) = default;

 private:
  std::vector<PulseSegment> segments_;
  std::string label_;
  std::optional<double> design_v_;
  std::optional<int> design_n_;
};

// Text form, one record per line:
//
//   sequence <label> design_v=<MHz|-> design_n=<n|->
//   <kind> <species> <omega MHz> <delta MHz> <phase rad> <duration us> [rotation rad]
//
// kind is drive|idle|instant, species is ancilla|data (idle lines use "-").
// Values are written with 17 significant digits so parsing is lossless.
std::string to_text(const PulseSequence& sequence);
PulseSequence parse_sequence(const std::string& text);

struct CompensationSolution {
  double delta_mhz;
  double omega_mhz;
  double duration_us;
  int n;
  double design_v_mhz;
};

// Geometric phase of a closed trajectory driven at detuning delta and Rabi
// frequency omega: -pi (1 + delta / sqrt(omega^2 + delta^2)), in (-2pi, 0).
double aa_phase(double delta_mhz, double omega_mhz);

// Delta = v / 2n^2, Omega = Delta sqrt(4n^2 - 1), t = 1 / sqrt(Omega^2 + Delta^2).
// The interacting branch then sees a generalized Rabi frequency exactly n
// times the non-interacting one, so both trajectories close after t.
CompensationSolution solve_compensation(double v_mhz, int n);

// sqrt(Omega^2 + (Delta - V)^2) - n sqrt(Omega^2 + Delta^2), in MHz.
double verify_closure(double delta_mhz, double omega_mhz, double v_mhz, int n);

// n * aa_phase(Delta - V, Omega) - aa_phase(Delta, Omega), wrapped to (-pi, pi].
// Throws InvalidArgument when |closure residual| exceeds closure_tolerance_mhz.
double predicted_delta_phi(double delta_mhz, double omega_mhz, double v_mhz, int n,
                           double closure_tolerance_mhz = 1e-9);

// pi - omega / v. First-order heuristic, only meaningful for omega << v.
double first_order_phase_error(double omega_mhz, double v_mhz);
// True when omega / v is small enough for the first-order estimate (< 0.1).
bool first_order_valid(double omega_mhz, double v_mhz);

enum class GateScheme { kResonant, kCompensated };

struct ReadoutSpec {
  GateScheme gate = GateScheme::kCompensated;
  double v_mhz = 1.1;         // design interaction for the compensated gate
  int n = 1;
  double omega_data_mhz = 0.918;  // resonant gate only
  double ramsey_phase_rad = 0.0;
  double ancilla_omega_mhz = 5.0;
  bool instantaneous_ancilla = false;
};

// ancilla pi/2 (phase 0) -> data 2pi closure pulse -> ancilla pi/2 (ramsey phase).
// The resonant data pulse lasts 1/Omega_data; the compensated one comes from
// solve_compensation(v, n).
PulseSequence build_readout_sequence(const ReadoutSpec& spec);

// ancilla pi/2 -> idle(delay) -> ancilla pi/2 (ramsey phase); no data pulse.
PulseSequence build_ramsey_sequence(double delay_us, double ramsey_phase_rad,
                                    double ancilla_omega_mhz, bool instantaneous);

const char* to_string(Target target);
const char* to_string(SegmentKind kind);
const char* to_string(GateScheme scheme);

}  // namespace rydstab::pulse
