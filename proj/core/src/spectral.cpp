#include "rydstab/spectral.hpp"

#include <algorithm>
#include <numeric>

#include "rydstab/error.hpp"

namespace rydstab::qcore {
namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

SpectralPropagator::SpectralPropagator(const HermitianOperator& hamiltonian)
    : dim_(hamiltonian.space().total_dim()) {
  const Matrix& h = hamiltonian.matrix();

  std::vector<int> parent(dim_);
  std::iota(parent.begin(), parent.end(), 0);
  for (int c = 0; c < dim_; ++c) {
    for (int r = c + 1; r < dim_; ++r) {
      if (h(r, c) != Complex(0.0) || h(c, r) != Complex(0.0)) {
        const int a = find_root(parent, r);
        const int b = find_root(parent, c);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  std::vector<int> block_of_root(dim_, -1);
  for (int i = 0; i < dim_; ++i) {
    const int root = find_root(parent, i);
    if (block_of_root[root] == -1) {
      block_of_root[root] = static_cast<int>(blocks_.size());
      blocks_.emplace_back();
    }
    blocks_[block_of_root[root]].indices.push_back(i);
  }

  for (Block& block : blocks_) {
    const auto n = static_cast<Eigen::Index>(block.indices.size());
    Matrix sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = h(block.indices[a], block.indices[b]);
    }
    if (n == 1) {
      block.eigenvectors = Matrix::Identity(1, 1);
      block.eigenvalues = Eigen::VectorXd::Constant(1, sub(0, 0).real());
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sub);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("Hermitian eigendecomposition failed");
    }
    block.eigenvectors = solver.eigenvectors();
    block.eigenvalues = solver.eigenvalues();
  }
}

std::size_t SpectralPropagator::largest_block() const noexcept {
  std::size_t largest = 0;
  for (const Block& b : blocks_) largest = std::max(largest, b.indices.size());
  return largest;
}

Matrix SpectralPropagator::unitary(double t_us) const {
  if (!(t_us >= 0.0)) throw InvalidArgument("propagator: duration must be >= 0");
  Matrix u = Matrix::Zero(dim_, dim_);
  for (const Block& block : blocks_) {
    const Eigen::VectorXcd phases =
        (block.eigenvalues.cast<Complex>() * Complex(0.0, -t_us)).array().exp();
    const Matrix sub = block.eigenvectors * phases.asDiagonal() * block.eigenvectors.adjoint();
    const auto n = static_cast<Eigen::Index>(block.indices.size());
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) u(block.indices[a], block.indices[b]) = sub(a, b);
    }
  }
  return u;
}

Vector SpectralPropagator::apply(const Vector& psi, double t_us) const {
  if (psi.size() != dim_) throw InvalidArgument("propagator apply: dimension mismatch");
  Vector out = psi;
  step(t_us).apply_in_place(out);
  return out;
}

SpectralPropagator::Step SpectralPropagator::step(double t_us) const {
  if (!(t_us >= 0.0)) throw InvalidArgument("propagator: duration must be >= 0");
  Step s;
  s.blocks_.reserve(blocks_.size());
  for (const Block& block : blocks_) {
    const Eigen::VectorXcd phases =
        (block.eigenvalues.cast<Complex>() * Complex(0.0, -t_us)).array().exp();
    s.blocks_.push_back(
        {block.indices, block.eigenvectors * phases.asDiagonal() * block.eigenvectors.adjoint()});
  }
  return s;
}

void SpectralPropagator::Step::apply_in_place(Vector& psi) const {
  for (const Block& block : blocks_) {
    const auto n = static_cast<Eigen::Index>(block.indices.size());
    if (n == 1) {
      psi(block.indices[0]) *= block.unitary(0, 0);
      continue;
    }
    scratch_in_.resize(n);
    bool occupied = false;
    for (Eigen::Index a = 0; a < n; ++a) {
      scratch_in_(a) = psi(block.indices[a]);
      occupied = occupied || scratch_in_(a) != Complex(0.0);
    }
    if (!occupied) continue;
    scratch_out_.noalias() = block.unitary * scratch_in_;
    for (Eigen::Index a = 0; a < n; ++a) psi(block.indices[a]) = scratch_out_(a);
  }
}

}  // namespace rydstab::qcore
