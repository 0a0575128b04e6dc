#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracle.hpp"
#include "rydstab/analysis.hpp"
#include "rydstab/dynamics.hpp"
#include "rydstab/error.hpp"
#include "rydstab/ramsey.hpp"
#include "rydstab/units.hpp"

using namespace rydstab;
using namespace rydstab::dynamics;
using system::AtomSystem;
using system::Role;

namespace {

pulse::ReadoutSpec compensated(double v) {
  pulse::ReadoutSpec spec;
  spec.gate = pulse::GateScheme::kCompensated;
  spec.v_mhz = v;
  spec.ancilla_omega_mhz = 5.0;
  return spec;
}

Experiment readout_experiment(const AtomSystem& sys, pulse::ReadoutSpec spec) {
  return {sys,
          [spec](double phi) mutable {
            spec.ramsey_phase_rad = phi;
            return pulse::build_readout_sequence(spec);
          },
          DataPrep::kSiteLevels, MeasurementScheme::kRydbergLoss, true};
}

double fitted_phase(const std::vector<FringeRow>& rows) {
  std::vector<analysis::FringeSample> s;
  for (const FringeRow& r : rows) s.push_back(analysis::FringeSample::exact(r.phase_rad, r.survival_prob));
  return analysis::fit_fringe(s).phase;
}

std::vector<double> fringe(const AtomSystem& sys, const pulse::ReadoutSpec& spec, int points = 12) {
  std::vector<double> out;
  for (const FringeRow& r : ramsey_scan(readout_experiment(sys, spec), phase_grid(points), {})) {
    out.push_back(r.survival_prob);
  }
  return out;
}

oracle::Vec to_oracle(const qcore::QuantumState& s) { return s.amplitudes(); }

}  // namespace

TEST(Unitary, MatchesRk4OracleForTwoAtoms) {
  const double v = 1.1;
  const pulse::CompensationSolution c = pulse::solve_compensation(v, 1);
  for (double phi : {0.0, 1.3, kPi}) {
    pulse::ReadoutSpec spec = compensated(v);
    spec.ramsey_phase_rad = phi;
    const AtomSystem sys = AtomSystem::two_atom(v);
    const auto result = evolve_unitary(initial_state(sys, DataPrep::kSiteLevels),
                                       pulse::build_readout_sequence(spec), sys);
    oracle::Vec psi = oracle::Vec::Zero(6);
    psi(oracle::idx(0, 1)) = 1.0;
    std::vector<oracle::Pulse> seq = oracle::readout(5.0, c.omega_mhz, c.delta_mhz, c.duration_us, phi);
    const oracle::Vec ref = oracle::run(seq, psi, v);
    const double overlap = std::abs(ref.dot(to_oracle(result.final_state)));
    EXPECT_GT(overlap * overlap, 1.0 - 1e-9) << "phi=" << phi;
  }
}

TEST(Unitary, PhaseShiftMatchesOracle) {
  for (double v : {0.8, 1.1, 2.0}) {
    const pulse::CompensationSolution c = pulse::solve_compensation(1.1, 1);
    const double expected = oracle::two_atom_delta_phi(5.0, c.omega_mhz, c.delta_mhz, c.duration_us, v);
    const pulse::ReadoutSpec spec = compensated(1.1);
    const double probe = fitted_phase(
        ramsey_scan(readout_experiment(AtomSystem::two_atom(v), spec), phase_grid(16), {}));
    const double ref = fitted_phase(
        ramsey_scan(readout_experiment(AtomSystem::two_atom(v, false), spec), phase_grid(16), {}));
    EXPECT_NEAR(wrap_phase(probe - ref - expected), 0.0, 1e-6) << "v=" << v;
  }
}

TEST(Unitary, DesignPointGivesPiShift) {
  const pulse::ReadoutSpec spec = compensated(1.1);
  const double probe = fitted_phase(
      ramsey_scan(readout_experiment(AtomSystem::two_atom(1.1), spec), phase_grid(12), {}));
  const double ref = fitted_phase(
      ramsey_scan(readout_experiment(AtomSystem::two_atom(1.1, false), spec), phase_grid(12), {}));
  EXPECT_NEAR(std::abs(wrap_phase(probe - ref)), kPi, 1e-6);
}

TEST(Unitary, InstantAncillaApproachesFinitePulseAtHighOmega) {
  pulse::ReadoutSpec fast = compensated(1.1);
  fast.ancilla_omega_mhz = 2000.0;
  pulse::ReadoutSpec instant = compensated(1.1);
  instant.instantaneous_ancilla = true;
  const AtomSystem sys = AtomSystem::two_atom(1.1);
  const auto a = fringe(sys, fast);
  const auto b = fringe(sys, instant);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 2e-3);
}

TEST(Unitary, DataInZeroIsASpectator) {
  // |0> is never driven: the fringe equals an empty data site.
  const pulse::ReadoutSpec spec = compensated(1.1);
  const auto zero = fringe(AtomSystem::two_atom(1.1, true, system::level::kZero), spec);
  const auto empty = fringe(AtomSystem::two_atom(1.1, false), spec);
  for (std::size_t k = 0; k < zero.size(); ++k) EXPECT_NEAR(zero[k], empty[k], 1e-12);
}

TEST(Unitary, BlockadeLimitGivesIdealMapping) {
  pulse::ReadoutSpec spec;
  spec.gate = pulse::GateScheme::kResonant;
  spec.omega_data_mhz = 1.0;
  spec.instantaneous_ancilla = true;
  const AtomSystem one = AtomSystem::two_atom(1e4);
  const AtomSystem zero = AtomSystem::two_atom(1e4, true, system::level::kZero);
  const auto s1 = ramsey_scan(readout_experiment(one, spec), {0.0}, {});
  const auto s0 = ramsey_scan(readout_experiment(zero, spec), {0.0}, {});
  EXPECT_GT(s1[0].survival_prob, 1.0 - 1e-6);
  EXPECT_LT(s0[0].survival_prob, 1e-12);
}

TEST(Unitary, PermutationSymmetryWithoutDataDataCoupling) {
  const pulse::ReadoutSpec spec = compensated(1.1);
  const AtomSystem edge = AtomSystem::square_plaquette(8.84, {true, true, false, false}, 1, {false});
  const AtomSystem diag = AtomSystem::square_plaquette(8.84, {true, false, false, true}, 1, {false});
  const auto a = fringe(edge, spec);
  const auto b = fringe(diag, spec);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
  // With coupling on, edge and diagonal pairs see different V_dd.
  const auto c = fringe(AtomSystem::square_plaquette(8.84, {true, true, false, false}), spec);
  const auto d = fringe(AtomSystem::square_plaquette(8.84, {true, false, false, true}), spec);
  double diff = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) diff = std::max(diff, std::abs(c[k] - d[k]));
  EXPECT_GT(diff, 1e-4);
}

TEST(Lindblad, WithoutChannelsEqualsUnitary) {
  const AtomSystem sys = AtomSystem::square_plaquette(8.84, {true, false, true, false});
  pulse::ReadoutSpec spec = compensated(1.1);
  spec.ramsey_phase_rad = 0.9;
  const auto seq = pulse::build_readout_sequence(spec);
  const auto init = initial_state(sys, DataPrep::kPlus);
  const auto u = evolve_unitary(init, seq, sys).final_state;
  const auto l = evolve_lindblad(init, seq, sys, {}).final_state;
  EXPECT_LT((u.as_density().density() - l.density()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Lindblad, DephasedRabiMatchesOracle) {
  const AtomSystem sys = AtomSystem::single_atom(Role::kAncilla);
  const double omega = 1.3, rate = 0.4;
  const auto channel = CollapseChannel::rydberg_dephasing(sys, 0, rate, false);
  const auto ref = oracle::dephased_rabi(omega, rate, 4.0, 17);
  for (int k = 1; k < 17; k += 3) {
    const double t = 4.0 * k / 16.0;
    const pulse::PulseSequence seq({pulse::PulseSegment::drive(pulse::Target::kAncilla, omega, 0.0, 0.0, t)});
    const auto out = evolve_lindblad(initial_state(sys, DataPrep::kSiteLevels), seq, sys, {channel});
    EXPECT_NEAR(qcore::population(out.final_state, 0, 0), ref[k], 1e-7) << "t=" << t;
  }
}

TEST(Lindblad, ChannelOnlyActsWhileDriven) {
  const AtomSystem sys = AtomSystem::single_atom(Role::kAncilla);
  const auto gated = CollapseChannel::rydberg_dephasing(sys, 0, 5.0, true);
  // pi/2 pulse then a long idle: a gated channel leaves the coherence alone.
  const pulse::PulseSequence seq({pulse::PulseSegment::instant(pulse::Target::kAncilla, kPi / 2, 0.0),
                                  pulse::PulseSegment::idle(2.0)});
  const auto out = evolve_lindblad(initial_state(sys, DataPrep::kSiteLevels), seq, sys, {gated});
  EXPECT_NEAR(std::abs(out.final_state.density()(0, 1)), 0.5, 1e-9);
  const auto always = CollapseChannel::rydberg_dephasing(sys, 0, 5.0, false);
  const auto out2 = evolve_lindblad(initial_state(sys, DataPrep::kSiteLevels), seq, sys, {always});
  EXPECT_NEAR(std::abs(out2.final_state.density()(0, 1)), 0.5 * std::exp(-5.0), 1e-6);
}

TEST(Trajectory, AverageMatchesLindblad) {
  const AtomSystem sys = AtomSystem::single_atom(Role::kAncilla);
  const double rate = 0.8;
  const pulse::PulseSequence seq({pulse::PulseSegment::drive(pulse::Target::kAncilla, 1.0, 0.0, 0.0, 1.3)});
  const auto init = initial_state(sys, DataPrep::kSiteLevels);
  const auto l = evolve_lindblad(init, seq, sys, {CollapseChannel::rydberg_dephasing(sys, 0, rate)});
  std::mt19937_64 rng(11);
  const int n = 4000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += qcore::population(evolve_trajectory(init, seq, sys, {rate}, 0.005, rng), 0, 0);
  }
  const double expected = qcore::population(l.final_state, 0, 0);
  // Per-trajectory spread is at most 1/2.
  EXPECT_NEAR(sum / n, expected, 4.0 * 0.5 / std::sqrt(n));
}

TEST(Measurement, LevelSurvivalPerScheme) {
  const AtomSystem sys = AtomSystem::two_atom(1.1);
  const SurvivalModel m{0.0, 0.0, 0.1};
  EXPECT_EQ(level_survival(sys, 0, 1, MeasurementScheme::kBoth, m), 0.0);
  EXPECT_EQ(level_survival(sys, 0, 0, MeasurementScheme::kBoth, m), 1.0);
  EXPECT_EQ(level_survival(sys, 1, 2, MeasurementScheme::kRydbergLoss, m), 0.0);
  EXPECT_EQ(level_survival(sys, 1, 1, MeasurementScheme::kRydbergLoss, m), 1.0);
  EXPECT_EQ(level_survival(sys, 1, 2, MeasurementScheme::kBlastOne, m), 1.0);
  EXPECT_EQ(level_survival(sys, 1, 1, MeasurementScheme::kBlastOne, m), 0.1);
  EXPECT_EQ(level_survival(sys, 1, 1, MeasurementScheme::kBoth, m), 0.1);
  EXPECT_EQ(level_survival(sys, 1, 0, MeasurementScheme::kBoth, m), 1.0);
}

TEST(Measurement, ExactSurvivalAndSampledFrequencyAgree) {
  const AtomSystem sys = AtomSystem::two_atom(1.1);
  // amplitudes over |a d>: g1 0.6, r2 0.48i, r1 0.64
  qcore::Vector v = qcore::Vector::Zero(6);
  v(oracle::idx(0, 1)) = 0.6;
  v(oracle::idx(1, 2)) = qcore::Complex(0, 0.48);
  v(oracle::idx(1, 1)) = 0.64;
  const auto state = qcore::QuantumState::from_vector(sys.space(), v);
  const SurvivalModel model{0.1, 0.05, 0.0};
  const auto exact = ancilla_survival(state, sys, MeasurementScheme::kRydbergLoss, true, model);
  // Postselecting on data survival drops the |r r> branch.
  EXPECT_NEAR(exact.ideal, 0.36 / (0.36 + 0.4096), 1e-12);
  EXPECT_NEAR(exact.with_background, exact.ideal * 0.9, 1e-12);
  EXPECT_NEAR(ancilla_survival(state, sys, MeasurementScheme::kRydbergLoss, false).ideal, 0.36, 1e-12);

  std::mt19937_64 rng(3);
  int accepted = 0, survived = 0;
  for (int k = 0; k < 40000; ++k) {
    const auto rec = measure(state, sys, MeasurementScheme::kRydbergLoss, true, model, rng);
    if (!rec.accepted) continue;
    ++accepted;
    survived += rec.ancilla_survived;
    EXPECT_EQ(rec.n1, rec.n_loaded - rec.n0);
  }
  const double f = static_cast<double>(survived) / accepted;
  EXPECT_NEAR(f, exact.with_background, 4.0 * std::sqrt(0.25 / accepted));
}

TEST(InitialState, PlusPrepAndMismatch) {
  const AtomSystem sys = AtomSystem::square_plaquette(8.84, {true, true, false, false});
  const auto plus = initial_state(sys, DataPrep::kPlus);
  EXPECT_NEAR(qcore::population(plus, 1, 1), 0.5, 1e-14);
  EXPECT_NEAR(qcore::population(plus, 0, 0), 1.0, 1e-14);
  const AtomSystem other = AtomSystem::two_atom(1.1);
  EXPECT_THROW(evolve_unitary(plus, pulse::build_readout_sequence(compensated(1.1)), other),
               InvalidArgument);
}
