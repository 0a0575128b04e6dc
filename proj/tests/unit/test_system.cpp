#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracle.hpp"
#include "rydstab/error.hpp"
#include "rydstab/system.hpp"

using namespace rydstab;
using namespace rydstab::system;

TEST(Vdw, StrengthAndDistanceAreInverse) {
  EXPECT_NEAR(vdw_strength(65.7, 6.0), 1000.0 * 65.7 / std::pow(6.0, 6), 1e-12);
  for (double v : {0.1, 1.1, 40.0}) {
    EXPECT_NEAR(vdw_strength(kC6InterNaCs, vdw_distance(kC6InterNaCs, v)), v, 1e-12 * v);
  }
  EXPECT_THROW(vdw_strength(65.7, 0.0), InvalidArgument);
  EXPECT_THROW(vdw_distance(65.7, 0.0), InvalidArgument);
}

TEST(Plaquette, InteractionsFollowGeometry) {
  const double side = 8.84;
  const AtomSystem sys = AtomSystem::square_plaquette(side, {true, true, true, true});
  ASSERT_EQ(sys.ancilla_site(), 0);
  const double r_da = side / std::sqrt(2.0);
  const double v_da = 1000.0 * 65.7 / std::pow(r_da, 6);
  EXPECT_NEAR(v_da, 1.1014, 5e-4);
  for (int d : sys.data_sites()) EXPECT_NEAR(sys.interaction(0, d), v_da, 1e-12);
  // Sites 1, 2 share the top edge; 1 and 4 are diagonal.
  EXPECT_NEAR(sys.interaction(1, 2), 1000.0 * 27.96 / std::pow(side, 6), 1e-12);
  EXPECT_NEAR(sys.interaction(1, 4), 1000.0 * 27.96 / std::pow(side * std::sqrt(2.0), 6), 1e-12);

  // Half-diagonal geometry gains a factor 8, the C6 ratio the rest.
  const double enhancement = v_da / sys.interaction(1, 2);
  EXPECT_NEAR(enhancement, 8.0 * 65.7 / 27.96, 1e-9);
  EXPECT_GT(enhancement, 18.0);
  EXPECT_LT(enhancement, 20.0);
}

TEST(Plaquette, DataShiftSumsNeighbours) {
  const double side = 8.84;
  const double nn = 1000.0 * 27.96 / std::pow(side, 6);
  EXPECT_NEAR(data_shift(2, 1, 27.96, side), 2.0 * nn + nn / 8.0, 1e-12);
  EXPECT_NEAR(data_shift(0, 0, 27.96, side), 0.0, 0.0);
}

TEST(AtomSystem, OrdersSitesAncillaFirstThenRowMajor) {
  std::vector<AtomSite> sites = {
      {Role::kData, {1.0, -1.0}, true, level::kOne},
      {Role::kData, {-1.0, 1.0}, true, level::kZero},
      {Role::kAncilla, {0.0, 0.0}, true, level::kGround},
      {Role::kData, {1.0, 1.0}, true, level::kOne},
  };
  // Override between original sites 0 and 2 (data at bottom right, ancilla).
  const AtomSystem sys(SpeciesParams::sodium_ancilla(), SpeciesParams::cesium_data(), kC6InterNaCs,
                       sites, {{0, 2, 3.0}});
  ASSERT_EQ(sys.num_sites(), 4);
  EXPECT_EQ(sys.sites()[0].role, Role::kAncilla);
  EXPECT_DOUBLE_EQ(sys.sites()[1].position.x_um, -1.0);  // top-left
  EXPECT_DOUBLE_EQ(sys.sites()[2].position.x_um, 1.0);   // top-right
  EXPECT_DOUBLE_EQ(sys.sites()[3].position.y_um, -1.0);  // bottom
  EXPECT_DOUBLE_EQ(sys.interaction(0, 3), 3.0);
}

TEST(AtomSystem, UnloadedSitesLeaveTheHilbertSpace) {
  const AtomSystem sys = AtomSystem::square_plaquette(8.84, {true, false, true, false});
  EXPECT_EQ(sys.space().total_dim(), 2 * 3 * 3);
  EXPECT_EQ(sys.hilbert_site(2), -1);
  EXPECT_EQ(sys.hilbert_site(3), 2);
  EXPECT_THROW(sys.interaction(0, 2), InvalidArgument);
  EXPECT_DOUBLE_EQ(sys.interaction_table()(0, 2), 0.0);
  EXPECT_EQ(sys.pair_index(0, 1), 0);
  EXPECT_EQ(sys.num_pairs(), 10);
}

TEST(AtomSystem, DataDataInteractionsCanBeSwitchedOff) {
  const AtomSystem sys = AtomSystem::square_plaquette(8.84, {true, true, true, true}, level::kOne, {false});
  EXPECT_DOUBLE_EQ(sys.interaction(1, 2), 0.0);
  EXPECT_GT(sys.interaction(0, 1), 1.0);
}

TEST(AtomSystem, TwoAtomPinsInteraction) {
  const AtomSystem sys = AtomSystem::two_atom(1.1);
  EXPECT_DOUBLE_EQ(sys.interaction(0, 1), 1.1);
  EXPECT_DOUBLE_EQ(AtomSystem::two_atom(0.0).interaction(0, 1), 0.0);
}

TEST(Hamiltonian, MatchesHandWrittenTwoAtomMatrix) {
  const double v = 1.1;
  const AtomSystem sys = AtomSystem::two_atom(v);
  DriveSettings drive;
  drive.ancilla = {0.7, 0.2, 0.4, true};
  drive.data = {0.9, -0.3, 1.1, true};
  const auto h = build_hamiltonian(sys, drive);
  oracle::Drive d;
  d.omega_a = 0.7;
  d.delta_a = 0.2;
  d.phase_a = 0.4;
  d.omega_d = 0.9;
  d.delta_d = -0.3;
  d.phase_d = 1.1;
  const Eigen::MatrixXcd ref = oracle::two_atom_h(d, v);
  EXPECT_LT((h.matrix() - ref).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Hamiltonian, OffsetsAndOmegaScalesAreLocal) {
  const AtomSystem base = AtomSystem::two_atom(0.0);
  const AtomSystem shifted = base.perturbed({0.0, 0.25}, {1.0}).with_omega_scales({1.0, 0.5});
  DriveSettings drive;
  drive.data = {1.0, 0.0, 0.0, true};
  const auto h = build_hamiltonian(shifted, drive);
  // |g, r> diagonal picks up the data offset, |g,1>-|g,r> coupling is halved.
  EXPECT_NEAR(h.matrix()(2, 2).real(), oracle::kTwoPi * 0.25, 1e-13);
  EXPECT_NEAR(std::abs(h.matrix()(1, 2)), oracle::kTwoPi * 0.25, 1e-13);
}
