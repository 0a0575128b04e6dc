#include "rydstab/dynamics.hpp"

#include <cmath>
#include <string>

#include "rydstab/error.hpp"
#include "rydstab/spectral.hpp"
#include "rydstab/units.hpp"

namespace rydstab::dynamics {

using qcore::Complex;
using qcore::Matrix;
using qcore::QuantumState;
using qcore::Vector;
using system::AtomSystem;
using system::Role;

namespace {

Role role_of(pulse::Target target) {
  return target == pulse::Target::kAncilla ? Role::kAncilla : Role::kData;
}

void require_space(const QuantumState& state, const AtomSystem& system) {
  if (!(state.space() == system.space())) {
    throw InvalidArgument("initial state does not match the system's level space");
  }
}

// Indices of basis states where hilbert site `h` sits in `level`.
std::vector<int> indices_with_level(const qcore::LevelSpace& space, int h, int level) {
  std::vector<int> out;
  for (int i = 0; i < space.total_dim(); ++i) {
    if (space.level_of(i, h) == level) out.push_back(i);
  }
  return out;
}

}  // namespace

system::DriveSettings drive_settings(const pulse::PulseSegment& segment) {
  system::DriveSettings drive;
  if (segment.kind != pulse::SegmentKind::kDrive) return drive;
  system::SpeciesDrive& d =
      segment.target == pulse::Target::kAncilla ? drive.ancilla : drive.data;
  d = {segment.omega_mhz, segment.delta_mhz, segment.phase_rad, true};
  return drive;
}

qcore::Operator instant_rotation(const AtomSystem& system, pulse::Target target, double angle_rad,
                                 double phase_rad) {
  const qcore::LevelSpace& space = system.space();
  const Role role = role_of(target);
  const system::SpeciesParams& sp = system.species(role);
  Matrix local = Matrix::Identity(sp.num_levels, sp.num_levels);
  const double c = std::cos(angle_rad / 2.0);
  const double s = std::sin(angle_rad / 2.0);
  const Complex minus_i(0.0, -1.0);
  local(sp.coupled_level, sp.coupled_level) = c;
  local(sp.rydberg_level, sp.rydberg_level) = c;
  local(sp.coupled_level, sp.rydberg_level) = minus_i * s * std::polar(1.0, phase_rad);
  local(sp.rydberg_level, sp.coupled_level) = minus_i * s * std::polar(1.0, -phase_rad);

  Matrix total = Matrix::Identity(space.total_dim(), space.total_dim());
  for (int site : system.loaded_sites()) {
    if (system.sites()[site].role != role) continue;
    total = qcore::embed_single_site(local, system.hilbert_site(site), space).matrix() * total;
  }
  return qcore::Operator(space, std::move(total));
}

EvolutionResult evolve_unitary(const QuantumState& initial, const pulse::PulseSequence& sequence,
                               const AtomSystem& system, bool record_trace) {
  if (!initial.is_pure()) throw InvalidArgument("evolve_unitary needs a pure initial state");
  require_space(initial, system);
  Vector psi = initial.amplitudes();
  EvolutionResult result{initial, {}, 0.0};
  for (const pulse::PulseSegment& seg : sequence.segments()) {
    if (seg.kind == pulse::SegmentKind::kInstant) {
      psi = instant_rotation(system, seg.target, seg.rotation_rad, seg.phase_rad).matrix() * psi;
    } else if (seg.duration_us > 0.0) {
      const qcore::HermitianOperator h = system::build_hamiltonian(system, drive_settings(seg));
      psi = qcore::SpectralPropagator(h).apply(psi, seg.duration_us);
    }
    result.total_duration_us += seg.duration_us;
    if (record_trace) {
      result.trace.push_back(QuantumState::from_vector(system.space(), psi, {1e-9}));
    }
  }
  if (std::abs(psi.norm() - 1.0) > 1e-9) {
    throw NumericalError("evolve_unitary: norm drifted to " + std::to_string(psi.norm()));
  }
  result.final_state = QuantumState::from_vector(system.space(), std::move(psi), {1e-9});
  return result;
}

CollapseChannel CollapseChannel::rydberg_dephasing(const AtomSystem& system, int site, double rate,
                                                   bool only_while_driven) {
  if (!(rate >= 0.0)) throw InvalidArgument("collapse channel rate must be >= 0");
  if (site < 0 || site >= system.num_sites()) throw InvalidArgument("channel site out of range");
  const system::SpeciesParams& sp = system.species(system.sites()[site].role);
  Matrix op = Matrix::Zero(sp.num_levels, sp.num_levels);
  op(sp.rydberg_level, sp.rydberg_level) = 1.0;
  std::optional<pulse::Target> active;
  if (only_while_driven) {
    active = system.sites()[site].role == Role::kAncilla ? pulse::Target::kAncilla
                                                         : pulse::Target::kData;
  }
  return {std::move(op), rate, site, active};
}

QuantumState evolve_trajectory(const QuantumState& initial, const pulse::PulseSequence& sequence,
                               const AtomSystem& system,
                               const std::vector<double>& dephasing_rate_per_site, double dt_us,
                               std::mt19937_64& rng) {
  if (!initial.is_pure()) throw InvalidArgument("evolve_trajectory needs a pure initial state");
  require_space(initial, system);
  if (static_cast<int>(dephasing_rate_per_site.size()) != system.num_sites()) {
    throw InvalidArgument("evolve_trajectory: one dephasing rate per system site expected");
  }
  if (!(dt_us > 0.0)) throw InvalidArgument("evolve_trajectory: dt must be > 0");

  const qcore::LevelSpace& space = system.space();
  struct Kick {
    double rate;
    Role role;
    std::vector<int> indices;
  };
  std::vector<Kick> kicks;
  for (int site : system.loaded_sites()) {
    const double rate = dephasing_rate_per_site[site];
    if (!(rate >= 0.0)) throw InvalidArgument("dephasing rate must be >= 0");
    if (rate == 0.0) continue;
    const Role role = system.sites()[site].role;
    kicks.push_back({rate, role,
                     indices_with_level(space, system.hilbert_site(site),
                                        system.species(role).rydberg_level)});
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  Vector psi = initial.amplitudes();
  for (const pulse::PulseSegment& seg : sequence.segments()) {
    if (seg.kind == pulse::SegmentKind::kInstant) {
      psi = instant_rotation(system, seg.target, seg.rotation_rad, seg.phase_rad).matrix() * psi;
      continue;
    }
    if (seg.duration_us <= 0.0) continue;
    const qcore::SpectralPropagator prop(system::build_hamiltonian(system, drive_settings(seg)));
    std::vector<const Kick*> active;
    if (seg.kind == pulse::SegmentKind::kDrive) {
      for (const Kick& k : kicks) {
        if (k.role == role_of(seg.target)) active.push_back(&k);
      }
    }
    if (active.empty()) {
      prop.step(seg.duration_us).apply_in_place(psi);
      continue;
    }
    const auto steps = static_cast<long>(std::ceil(seg.duration_us / dt_us - 1e-9));
    const double h = seg.duration_us / static_cast<double>(steps);
    const qcore::SpectralPropagator::Step step = prop.step(h);
    for (long s = 0; s < steps; ++s) {
      step.apply_in_place(psi);
      for (const Kick* k : active) {
        const Complex kick = std::polar(1.0, -std::sqrt(k->rate * h) * normal(rng));
        for (int i : k->indices) psi(i) *= kick;
      }
    }
  }
  psi /= psi.norm();
  return QuantumState::from_vector(space, std::move(psi), {1e-9});
}

QuantumState initial_state(const AtomSystem& system, DataPrep prep) {
  const qcore::LevelSpace& space = system.space();
  std::vector<Vector> locals;
  for (int site : system.loaded_sites()) {
    const system::AtomSite& a = system.sites()[site];
    const int dim = system.species(a.role).num_levels;
    Vector v = Vector::Zero(dim);
    if (a.role == Role::kData && prep == DataPrep::kPlus) {
      v(system::level::kZero) = v(system::level::kOne) = 1.0 / std::sqrt(2.0);
    } else {
      if (a.initial_level < 0 || a.initial_level >= dim) {
        throw InvalidArgument("initial level out of range at site " + std::to_string(site));
      }
      v(a.initial_level) = 1.0;
    }
    locals.push_back(std::move(v));
  }
  return QuantumState::product(space, locals);
}

}  // namespace rydstab::dynamics
