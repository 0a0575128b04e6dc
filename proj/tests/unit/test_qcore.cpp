#include <gtest/gtest.h>

#include <random>

#include "rydstab/error.hpp"
#include "rydstab/qcore.hpp"
#include "rydstab/spectral.hpp"

using namespace rydstab;
using namespace rydstab::qcore;

namespace {

Matrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return 0.5 * (m + m.adjoint());
}

// Scaling and squaring with a long Taylor series.
Matrix taylor_exp(const Matrix& a) {
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.1) {
    norm /= 2.0;
    ++squarings;
  }
  const Matrix b = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace

TEST(LevelSpace, FirstSiteVariesSlowest) {
  const LevelSpace space({2, 3, 3});
  EXPECT_EQ(space.total_dim(), 18);
  EXPECT_EQ(space.stride(0), 9);
  EXPECT_EQ(space.stride(2), 1);
  const int levels[] = {1, 2, 0};
  const int index = space.index_of(levels);
  EXPECT_EQ(index, 9 + 6);
  for (int s = 0; s < 3; ++s) EXPECT_EQ(space.level_of(index, s), levels[s]);
}

TEST(LevelSpace, RejectsBadDimensions) {
  EXPECT_THROW(LevelSpace({}), InvalidArgument);
  EXPECT_THROW(LevelSpace({2, 1}), InvalidArgument);
  EXPECT_THROW(LevelSpace({3, 3, 3, 3, 3, 3, 3}), InvalidArgument);  // 2187 > 1024
}

TEST(Propagator, MatchesTaylorSeriesAndIsUnitary) {
  std::mt19937_64 rng(5);
  const LevelSpace space({3, 3});
  const Matrix h = random_hermitian(9, rng);
  const HermitianOperator op(space, h);
  for (double t : {0.0, 0.37, 2.5}) {
    const Matrix u = propagator(op, t).matrix();
    const Matrix ref = taylor_exp(Complex(0, -t) * h);
    EXPECT_LT((u - ref).cwiseAbs().maxCoeff(), 1e-11) << "t = " << t;
    EXPECT_LT(unitarity_defect(u), 1e-12);
  }
}

TEST(Propagator, RejectsNegativeTime) {
  const LevelSpace space({2});
  EXPECT_THROW(propagator(HermitianOperator(space, Matrix::Identity(2, 2)), -1.0), InvalidArgument);
}

TEST(HermitianOperator, RejectsNonHermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(HermitianOperator(LevelSpace({2}), m), InvalidArgument);
}

TEST(SpectralPropagator, SplitsUncoupledBlocksAndAgreesWithDense) {
  std::mt19937_64 rng(9);
  const LevelSpace space({3});
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 0.3;  // uncoupled spectator
  h.block(1, 1, 2, 2) = random_hermitian(2, rng);
  const HermitianOperator op(space, h);
  const SpectralPropagator sp(op);
  EXPECT_EQ(sp.num_blocks(), 2);
  EXPECT_EQ(sp.largest_block(), 2u);
  const Matrix dense = propagator(op, 1.3).matrix();
  EXPECT_LT((sp.unitary(1.3) - dense).cwiseAbs().maxCoeff(), 1e-13);

  Vector psi(3);
  psi << 0.6, Complex(0, 0.8), 0.0;
  const auto step = sp.step(1.3);
  Vector in_place = psi;
  step.apply_in_place(in_place);
  EXPECT_LT((in_place - dense * psi).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((sp.apply(psi, 1.3) - dense * psi).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(QuantumState, ValidatesNormAndHermiticity) {
  const LevelSpace space({2});
  Vector v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(QuantumState::from_vector(space, v), InvalidArgument);
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  rho(0, 1) = 0.2;
  EXPECT_THROW(QuantumState::from_density(space, rho), InvalidArgument);
  rho(0, 1) = 0.0;
  rho(1, 1) = 0.5;
  EXPECT_THROW(QuantumState::from_density(space, rho), InvalidArgument);  // trace 1.5
}

TEST(QuantumState, ProductPopulationsAndReducedDensity) {
  const LevelSpace space({2, 3});
  Vector a(2), d(3);
  a << std::sqrt(0.25), std::sqrt(0.75);
  d << 0.0, Complex(0, 1), 0.0;
  const Vector sites[] = {a, d};
  const QuantumState s = QuantumState::product(space, sites);
  EXPECT_NEAR(population(s, 0, 1), 0.75, 1e-14);
  EXPECT_NEAR(population(s, 1, 1), 1.0, 1e-14);
  const Matrix r0 = reduced_density(s, 0);
  EXPECT_NEAR(r0(0, 1).real(), std::sqrt(0.25 * 0.75), 1e-14);
  EXPECT_NEAR(s.probabilities().sum(), 1.0, 1e-14);

  const SiteLevel cond[] = {{1, 1}};
  const Vector branch = branch_amplitude(s, cond);
  ASSERT_EQ(branch.size(), 2);
  EXPECT_NEAR(std::abs(branch(1)), std::sqrt(0.75), 1e-14);

  const QuantumState mixed = s.as_density();
  EXPECT_FALSE(mixed.is_pure());
  EXPECT_NEAR(fidelity(s, mixed), 1.0, 1e-14);
  EXPECT_THROW(fidelity(mixed, mixed), InvalidArgument);
  EXPECT_THROW(branch_amplitude(mixed, cond), InvalidArgument);
}

TEST(Operators, EmbeddingAndPairProjector) {
  const LevelSpace space({2, 3});
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const Operator ex = embed_single_site(x, 0, space);
  const int from[] = {0, 2};
  const int to[] = {1, 2};
  EXPECT_NEAR(std::abs(ex.matrix()(space.index_of(to), space.index_of(from))), 1.0, 1e-15);

  const Operator p = embed_pair_projector(0, 1, 1, 2, space);
  EXPECT_NEAR(p.matrix().trace().real(), 1.0, 1e-15);
  EXPECT_NEAR(p.matrix()(space.index_of(to), space.index_of(to)).real(), 1.0, 1e-15);
  EXPECT_THROW(embed_pair_projector(0, 1, 0, 0, space), InvalidArgument);
}
