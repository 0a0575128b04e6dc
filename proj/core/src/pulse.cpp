#include "rydstab/pulse.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "rydstab/error.hpp"
#include "rydstab/units.hpp"

namespace rydstab::pulse {
namespace {

void validate(const PulseSegment& s) {
  if (!(s.duration_us >= 0.0)) throw InvalidArgument("pulse segment duration must be >= 0");
  if (!(s.omega_mhz >= 0.0)) throw InvalidArgument("pulse segment omega must be >= 0");
  if (!std::isfinite(s.delta_mhz) || !std::isfinite(s.phase_rad)) {
    throw InvalidArgument("pulse segment detuning and phase must be finite");
  }
  switch (s.kind) {
    case SegmentKind::kIdle:
      if (s.omega_mhz != 0.0) throw InvalidArgument("idle segments must have omega = 0");
      break;
    case SegmentKind::kInstant:
      if (s.duration_us != 0.0) throw InvalidArgument("instant segments have zero duration");
      break;
    case SegmentKind::kDrive:
      break;
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

PulseSegment PulseSegment::drive(Target target, double omega_mhz, double delta_mhz,
                                 double phase_rad, double duration_us) {
  return {SegmentKind::kDrive, target, omega_mhz, delta_mhz, phase_rad, duration_us, 0.0};
}

PulseSegment PulseSegment::idle(double duration_us) {
  return {SegmentKind::kIdle, Target::kAncilla, 0.0, 0.0, 0.0, duration_us, 0.0};
}

PulseSegment PulseSegment::instant(Target target, double rotation_rad, double phase_rad) {
  return {SegmentKind::kInstant, target, 0.0, 0.0, phase_rad, 0.0, rotation_rad};
}

PulseSequence::PulseSequence(std::vector<PulseSegment> segments, std::string label,
                             std::optional<double> design_v_mhz, std::optional<int> design_n)
    : segments_(std::move(segments)),
      label_(std::move(label)),
      design_v_(design_v_mhz),
      design_n_(design_n) {
  if (segments_.empty()) throw InvalidArgument("pulse sequence must not be empty");
  for (const PulseSegment& s : segments_) validate(s);
  if (label_.find_first_of(" \t\n") != std::string::npos) {
    throw InvalidArgument("pulse sequence label must not contain whitespace");
  }
}

double PulseSequence::total_duration_us() const noexcept {
  double total = 0.0;
  for (const PulseSegment& s : segments_) total += s.duration_us;
  return total;
}

const char* to_string(Target target) {
  return target == Target::kAncilla ? "ancilla" : "data";
}

const char* to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kDrive: return "drive";
    case SegmentKind::kIdle: return "idle";
    case SegmentKind::kInstant: return "instant";
  }
  return "?";
}

const char* to_string(GateScheme scheme) {
  return scheme == GateScheme::kResonant ? "resonant" : "compensated";
}

std::string to_text(const PulseSequence& sequence) {
  std::ostringstream os;
  os << "sequence " << (sequence.label().empty() ? "-" : sequence.label())
     << " design_v=" << (sequence.design_v_mhz() ? format_double(*sequence.design_v_mhz()) : "-")
     << " design_n=" << (sequence.design_n() ? std::to_string(*sequence.design_n()) : "-")
     << '\n';
  for (const PulseSegment& s : sequence.segments()) {
    os << to_string(s.kind) << ' ' << (s.kind == SegmentKind::kIdle ? "-" : to_string(s.target))
       << ' ' << format_double(s.omega_mhz) << ' ' << format_double(s.delta_mhz) << ' '
       << format_double(s.phase_rad) << ' ' << format_double(s.duration_us);
    if (s.kind == SegmentKind::kInstant) os << ' ' << format_double(s.rotation_rad);
    os << '\n';
  }
  return os.str();
}

PulseSequence parse_sequence(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::string label;
  std::optional<double> design_v;
  std::optional<int> design_n;
  bool have_header = false;
  std::vector<PulseSegment> segments;

  auto fail = [&](const std::string& why) {
    throw InvalidArgument("pulse sequence line " + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head.empty()) continue;
    if (head == "sequence") {
      if (have_header) fail("duplicate header");
      have_header = true;
      std::string tok;
      fields >> label;
      if (label == "-") label.clear();
      while (fields >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) fail("expected key=value, got '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        try {
          if (key == "design_v") {
            if (value != "-") design_v = std::stod(value);
          } else if (key == "design_n") {
            if (value != "-") design_n = std::stoi(value);
          } else {
            fail("unknown header key '" + key + "'");
          }
        } catch (const std::logic_error&) {
          fail("bad value for " + key);
        }
      }
      continue;
    }
    PulseSegment seg;
    if (head == "drive") {
      seg.kind = SegmentKind::kDrive;
    } else if (head == "idle") {
      seg.kind = SegmentKind::kIdle;
    } else if (head == "instant") {
      seg.kind = SegmentKind::kInstant;
    } else {
      fail("unknown segment kind '" + head + "'");
    }
    std::string species;
    fields >> species;
    if (species == "ancilla") {
      seg.target = Target::kAncilla;
    } else if (species == "data") {
      seg.target = Target::kData;
    } else if (species != "-" || seg.kind != SegmentKind::kIdle) {
      fail("unknown species '" + species + "'");
    }
    if (!(fields >> seg.omega_mhz >> seg.delta_mhz >> seg.phase_rad >> seg.duration_us)) {
      fail("expected omega, delta, phase and duration");
    }
    if (seg.kind == SegmentKind::kInstant && !(fields >> seg.rotation_rad)) {
      fail("instant segment needs a rotation angle");
    }
    std::string extra;
    if (fields >> extra) fail("unexpected trailing field '" + extra + "'");
    segments.push_back(seg);
  }
  if (!have_header) throw InvalidArgument("pulse sequence: missing 'sequence' header");
  return PulseSequence(std::move(segments), label, design_v, design_n);
}

double aa_phase(double delta_mhz, double omega_mhz) {
  const double rate = std::hypot(omega_mhz, delta_mhz);
  if (rate == 0.0) throw InvalidArgument("aa_phase: omega and delta are both zero");
  return -kPi * (1.0 + delta_mhz / rate);
}

CompensationSolution solve_compensation(double v_mhz, int n) {
  if (!(v_mhz > 0.0)) throw InvalidArgument("solve_compensation: v must be > 0");
  if (n < 1) throw InvalidArgument("solve_compensation: n must be >= 1");
  const double nn = static_cast<double>(n);
  const double delta = v_mhz / (2.0 * nn * nn);
  const double omega = delta * std::sqrt(4.0 * nn * nn - 1.0);
  return {delta, omega, 1.0 / std::hypot(omega, delta), n, v_mhz};
}

double verify_closure(double delta_mhz, double omega_mhz, double v_mhz, int n) {
  return std::hypot(omega_mhz, delta_mhz - v_mhz) - n * std::hypot(omega_mhz, delta_mhz);
}

double predicted_delta_phi(double delta_mhz, double omega_mhz, double v_mhz, int n,
                           double closure_tolerance_mhz) {
  const double residual = verify_closure(delta_mhz, omega_mhz, v_mhz, n);
  if (!(std::abs(residual) <= closure_tolerance_mhz)) {
    std::ostringstream msg;
    msg << "predicted_delta_phi: trajectory does not close (residual " << residual << " MHz)";
    throw InvalidArgument(msg.str());
  }
  if (v_mhz == 0.0 && omega_mhz == 0.0 && delta_mhz == 0.0) return 0.0;
  if (omega_mhz == 0.0 && delta_mhz == 0.0) {
    throw InvalidArgument("predicted_delta_phi: omega and delta are both zero");
  }
  return wrap_phase(n * aa_phase(delta_mhz - v_mhz, omega_mhz) - aa_phase(delta_mhz, omega_mhz));
}

double first_order_phase_error(double omega_mhz, double v_mhz) {
  if (!(v_mhz > 0.0)) throw InvalidArgument("first_order_phase_error: v must be > 0");
  return kPi - omega_mhz / v_mhz;
}

bool first_order_valid(double omega_mhz, double v_mhz) {
  return v_mhz > 0.0 && omega_mhz / v_mhz < 0.1;
}

PulseSequence build_readout_sequence(const ReadoutSpec& spec) {
  if (!(spec.ancilla_omega_mhz > 0.0)) {
    throw InvalidArgument("build_readout_sequence: ancilla omega must be > 0");
  }
  auto ancilla_half_pi = [&](double phase) {
    if (spec.instantaneous_ancilla) return PulseSegment::instant(Target::kAncilla, kPi / 2, phase);
    return PulseSegment::drive(Target::kAncilla, spec.ancilla_omega_mhz, 0.0, phase,
                               1.0 / (4.0 * spec.ancilla_omega_mhz));
  };

  PulseSegment data_pulse;
  std::optional<double> design_v;
  std::optional<int> design_n;
  std::string label;
  if (spec.gate == GateScheme::kResonant) {
    if (!(spec.omega_data_mhz > 0.0)) {
      throw InvalidArgument("build_readout_sequence: data omega must be > 0");
    }
    data_pulse =
        PulseSegment::drive(Target::kData, spec.omega_data_mhz, 0.0, 0.0, 1.0 / spec.omega_data_mhz);
    label = "resonant";
  } else {
    if (!(spec.v_mhz > 0.0)) {
      throw InvalidArgument("build_readout_sequence: compensated gate needs v > 0");
    }
    const CompensationSolution sol = solve_compensation(spec.v_mhz, spec.n);
    data_pulse =
        PulseSegment::drive(Target::kData, sol.omega_mhz, sol.delta_mhz, 0.0, sol.duration_us);
    design_v = spec.v_mhz;
    design_n = spec.n;
    label = "compensated";
  }
  return PulseSequence({ancilla_half_pi(0.0), data_pulse, ancilla_half_pi(spec.ramsey_phase_rad)},
                       label, design_v, design_n);
}

PulseSequence build_ramsey_sequence(double delay_us, double ramsey_phase_rad,
                                    double ancilla_omega_mhz, bool instantaneous) {
  if (!(ancilla_omega_mhz > 0.0)) {
    throw InvalidArgument("build_ramsey_sequence: ancilla omega must be > 0");
  }
  auto half_pi = [&](double phase) {
    if (instantaneous) return PulseSegment::instant(Target::kAncilla, kPi / 2, phase);
    return PulseSegment::drive(Target::kAncilla, ancilla_omega_mhz, 0.0, phase,
                               1.0 / (4.0 * ancilla_omega_mhz));
  };
  return PulseSequence({half_pi(0.0), PulseSegment::idle(delay_us), half_pi(ramsey_phase_rad)},
                       "ramsey");
}

}  // namespace rydstab::pulse
