#pragma once

#include <vector>

#include "rydstab/qcore.hpp"

namespace rydstab::qcore {

// Eigendecomposition of a Hermitian operator, split into the connected
// components of its nonzero pattern. Components never mix under exp(-iHt),
// so each one is diagonalized on its own. Spectator levels (for example the
// uncoupled |0> of a data atom) fall out as separate components for free.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const HermitianOperator& hamiltonian);

  int dim() const noexcept { return dim_; }
  int num_blocks() const noexcept { return static_cast<int>(blocks_.size()); }
  std::size_t largest_block() const noexcept;

  // Dense exp(-i H t).
  Matrix unitary(double t_us) const;
  // exp(-i H t) |psi>.
  Vector apply(const Vector& psi, double t_us) const;

  // A fixed-duration step, precomputed once per block so that repeated
  // application costs only small dense mat-vecs.
  class Step {
   public:
    void apply_in_place(Vector& psi) const;

   private:
    friend class SpectralPropagator;
    struct Block {
      std::vector<int> indices;
      Matrix unitary;
    };
    std::vector<Block> blocks_;
    mutable Vector scratch_in_;
    mutable Vector scratch_out_;
  };
  Step step(double t_us) const;

 private:
  struct Block {
    std::vector<int> indices;
    Matrix eigenvectors;
    Eigen::VectorXd eigenvalues;
  };

  int dim_ = 0;
  std::vector<Block> blocks_;
};

}  // namespace rydstab::qcore
