#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "../support/oracle.hpp"
#include "rydstab/error.hpp"
#include "rydstab/noise.hpp"
#include "rydstab/ramsey.hpp"
#include "rydstab/units.hpp"

using namespace rydstab;
using namespace rydstab::noise;
using system::AtomSystem;
using system::Role;

TEST(T2Star, SigmaReproducesGaussianDecay) {
  const double t2 = 3.4;
  const double sigma = t2star_to_sigma(t2);
  // <cos(2 pi d t)> for d ~ N(0, sigma) is exp(-(2 pi sigma t)^2 / 2).
  for (double t : {1.0, 3.4, 5.0}) {
    EXPECT_NEAR(std::exp(-0.5 * std::pow(kTwoPi * sigma * t, 2)), std::exp(-(t / t2) * (t / t2)), 1e-12);
  }
  EXPECT_EQ(t2star_to_sigma(kInfinity), 0.0);
  EXPECT_THROW(t2star_to_sigma(0.0), InvalidArgument);
}

TEST(RabiEnvelope, WeakDephasingGivesFourOverRate) {
  const double rate = 0.2;
  EXPECT_NEAR(rabi_envelope_tau(Role::kAncilla, 1.3, rate, 40.0), 4.0 / rate, 0.05 * 4.0 / rate);
  EXPECT_EQ(rabi_envelope_tau(Role::kData, 0.9, 0.0, 5.0), kInfinity);
}

TEST(RabiEnvelope, CalibrationHitsTargetOnOracle) {
  const struct {
    double tau, omega;
    Role role;
  } cases[] = {{12.0, 1.3, Role::kAncilla}, {22.0, 0.918, Role::kData}};
  for (const auto& c : cases) {
    const double rate = calibrate_dephasing_rate(c.tau, c.omega, c.role);
    EXPECT_NEAR(rabi_envelope_tau(c.role, c.omega, rate, 2.0 * c.tau), c.tau, 0.01 * c.tau);
    EXPECT_NEAR(oracle::envelope_tau(c.omega, rate, 2.0 * c.tau), c.tau, 0.03 * c.tau);
  }
  EXPECT_EQ(calibrate_dephasing_rate(kInfinity, 1.0), 0.0);
}

TEST(NoiseModel, ValidateNamesTheField) {
  NoiseModel m;
  EXPECT_NO_THROW(m.validate());
  m.spam = 1.5;
  try {
    m.validate();
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("noise.spam"), std::string::npos);
  }
  m = NoiseModel{};
  m.data.t2_star_us = -1.0;
  EXPECT_THROW(m.validate(), InvalidArgument);
  EXPECT_NEAR(NoiseModel{}.ancilla.background_loss(), 1.0 - 0.975 * 0.891, 1e-15);
}

TEST(ShotDraw, DeterministicAndIndependentStreams) {
  const AtomSystem sys = AtomSystem::square_plaquette(8.84, {true, true, true, true});
  const NoiseModel m;
  LoadingSpec loading;
  loading.kind = LoadingSpec::Kind::kBernoulli;
  EXPECT_EQ(draw_shot(m, sys, loading, 4, 17), draw_shot(m, sys, loading, 4, 17));
  EXPECT_FALSE(draw_shot(m, sys, loading, 4, 17) == draw_shot(m, sys, loading, 4, 18));

  // Changing the SPAM rate must not move the detuning or pair draws.
  NoiseModel other = m;
  other.spam = 0.3;
  const ShotDraw a = draw_shot(m, sys, loading, 4, 17);
  const ShotDraw b = draw_shot(other, sys, loading, 4, 17);
  EXPECT_EQ(a.detuning_offsets_mhz, b.detuning_offsets_mhz);
  EXPECT_EQ(a.pair_scales, b.pair_scales);
  EXPECT_EQ(a.loaded, b.loaded);

  std::set<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 4; ++k) seeds.insert(stream_seed(1, 0, k, 0));
  EXPECT_EQ(seeds.size(), 4u);
}

TEST(ShotDraw, LoadingAndInteractionStatistics) {
  const AtomSystem sys = AtomSystem::square_plaquette(8.84, {true, true, true, true});
  NoiseModel m = NoiseModel::none();
  m.v_fluctuation_fraction = 0.2;
  LoadingSpec fixed;
  fixed.kind = LoadingSpec::Kind::kFixedCount;
  fixed.count = 2;
  LoadingSpec bern;
  bern.kind = LoadingSpec::Kind::kBernoulli;
  bern.probability = 0.3;
  int loaded = 0;
  const int shots = 4000;
  double scale_sum = 0.0;
  for (int s = 0; s < shots; ++s) {
    const ShotDraw f = draw_shot(m, sys, fixed, 9, s);
    EXPECT_TRUE(f.loaded[0]);
    EXPECT_EQ(std::count(f.loaded.begin() + 1, f.loaded.end(), true), 2);
    const ShotDraw b = draw_shot(m, sys, bern, 9, s);
    loaded += static_cast<int>(std::count(b.loaded.begin() + 1, b.loaded.end(), true));
    for (double x : f.pair_scales) {
      EXPECT_GE(x, 0.8);
      EXPECT_LE(x, 1.2);
      scale_sum += x;
    }
    for (double d : f.detuning_offsets_mhz) EXPECT_EQ(d, 0.0);
  }
  const double p = static_cast<double>(loaded) / (4.0 * shots);
  EXPECT_NEAR(p, 0.3, 4.0 * std::sqrt(0.21 / (4.0 * shots)));
  EXPECT_NEAR(scale_sum / (shots * sys.num_pairs()), 1.0, 0.01);
  fixed.count = 5;
  EXPECT_THROW(draw_shot(m, sys, fixed, 9, 0), InvalidArgument);
}

TEST(MonteCarlo, DeterministicAndNoiselessLimit) {
  pulse::ReadoutSpec spec;
  spec.instantaneous_ancilla = true;
  const dynamics::Experiment exp{AtomSystem::two_atom(1.1),
                                 [spec](double phi) mutable {
                                   spec.ramsey_phase_rad = phi;
                                   return pulse::build_readout_sequence(spec);
                                 }};
  MonteCarloConfig cfg;
  cfg.shots_per_phase = 50;
  cfg.seed = 21;
  const std::vector<double> phases = {0.0, kPi};
  const auto a = run_monte_carlo(exp, phases, NoiseModel::none(), cfg);
  const auto b = run_monte_carlo(exp, phases, NoiseModel::none(), cfg);
  ASSERT_EQ(a.records.size(), 100u);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].measurement.ancilla_survived, b.records[k].measurement.ancilla_survived);
  }
  // Compensated gate on |1>: the ancilla returns to |g> at phase 0 and to |r> at pi.
  EXPECT_EQ(a.summary[0].successes, 50);
  EXPECT_EQ(a.summary[1].successes, 0);

  const auto rows = summarize(a.records, phases, 0.5, [](const ShotRecord& r) { return r.phase_index == 1; });
  EXPECT_EQ(rows[0].shots, 0);
  EXPECT_EQ(rows[1].shots, 50);
  EXPECT_DOUBLE_EQ(rows[1].ideal_survival_prob, 0.0);
  EXPECT_NEAR(binomial_stderr(0.5, 100), 0.05, 1e-15);
  EXPECT_EQ(binomial_stderr(0.5, 0), 0.0);
}

TEST(MonteCarlo, NoisyRunMatchesLindbladOnAverage) {
  // Only calibrated damping on: MC trajectories and Lindblad agree in expectation.
  NoiseModel m = NoiseModel::none();
  m.ancilla.rabi_tau_us = 12.0;
  m.data.rabi_tau_us = 22.0;
  pulse::ReadoutSpec spec;
  const dynamics::Experiment exp{AtomSystem::two_atom(1.1),
                                 [spec](double phi) mutable {
                                   spec.ramsey_phase_rad = phi;
                                   return pulse::build_readout_sequence(spec);
                                 }};
  const std::vector<double> phases = {kPi / 2};
  dynamics::ScanOptions lind;
  lind.mode = dynamics::Mode::kLindblad;
  lind.noise = m;
  const double exact = dynamics::ramsey_scan(exp, phases, lind)[0].survival_prob;
  dynamics::ScanOptions mc = lind;
  mc.mode = dynamics::Mode::kMonteCarlo;
  mc.monte_carlo.shots_per_phase = 3000;
  mc.monte_carlo.seed = 5;
  const auto row = dynamics::ramsey_scan(exp, phases, mc)[0];
  EXPECT_NEAR(row.survival_prob, exact, 4.0 * binomial_stderr(exact, row.shots));
}
