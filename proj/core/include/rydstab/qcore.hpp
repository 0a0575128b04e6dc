#pragma once

// Dense complex linear algebra for small tensor-product quantum systems.
//
// Site ordering is fixed: site 0 is the slowest-varying factor of the
// tensor product, so the basis index of levels (l0, l1, ..., lk) is
// sum_i l_i * stride_i with stride_k = 1.

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace rydstab::qcore {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxTotalDim = 1024;

class LevelSpace {
 public:
  // Throws InvalidArgument if dims is empty, any dim < 2, or the product
  // exceeds kMaxTotalDim.
  explicit LevelSpace(std::vector<int> dims);

  int num_sites() const noexcept { return static_cast<int>(dims_.size()); }
  int dim(int site) const;
  int total_dim() const noexcept { return total_; }
  const std::vector<int>& dims() const noexcept { return dims_; }
  int stride(int site) const;

  int level_of(int index, int site) const;
  int index_of(std::span<const int> levels) const;

  friend bool operator==(const LevelSpace&, const LevelSpace&) = default;

 private:
  std::vector<int> dims_;
  std::vector<int> strides_;
  int total_ = 1;
};

// A general (not necessarily Hermitian) operator on a LevelSpace.
class Operator {
 public:
  Operator(LevelSpace space, Matrix matrix);

  static Operator identity(const LevelSpace& space);

  const LevelSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  Operator operator*(const Operator& rhs) const;
  Operator operator+(const Operator& rhs) const;
  Operator adjoint() const;

 private:
  LevelSpace space_;
  Matrix matrix_;
};

// Hamiltonian-like operator in angular-frequency units (rad/us).
class HermitianOperator {
 public:
  static constexpr double kTolerance = 1e-10;

  // Throws InvalidArgument unless |M - M^dagger|_max <= kTolerance * max(1, |M|_max).
  HermitianOperator(LevelSpace space, Matrix matrix);

  const LevelSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Operator as_operator() const { return Operator(space_, matrix_); }

 private:
  LevelSpace space_;
  Matrix matrix_;
};

struct StateTolerance {
  double norm = 1e-10;
  double hermiticity = 1e-10;
  double trace = 1e-10;
  double eigenvalue_floor = -1e-9;
};

// Pure state vector or density matrix over a LevelSpace.
class QuantumState {
 public:
  static QuantumState from_vector(LevelSpace space, Vector amplitudes,
                                  StateTolerance tol = {});
  static QuantumState from_density(LevelSpace space, Matrix rho, StateTolerance tol = {});
  static QuantumState basis(const LevelSpace& space, std::span<const int> levels);
  // Tensor product of normalized single-site vectors.
  static QuantumState product(const LevelSpace& space, std::span<const Vector> site_states);

  const LevelSpace& space() const noexcept { return space_; }
  bool is_pure() const noexcept { return std::holds_alternative<Vector>(repr_); }

  // Throws InvalidArgument for a mixed state.
  const Vector& amplitudes() const;
  // Always available; computed as |psi><psi| for pure states.
  Matrix density() const;
  QuantumState as_density() const;
  // Probability of every basis state.
  Eigen::VectorXd probabilities() const;

 private:
  QuantumState(LevelSpace space, std::variant<Vector, Matrix> repr);

  LevelSpace space_;
  std::variant<Vector, Matrix> repr_;
};

struct SiteLevel {
  int site;
  int level;
};

// identity (x) ... (x) op (x) ... (x) identity, with op at `site`.
Operator embed_single_site(const Matrix& op, int site, const LevelSpace& space);

// Projector onto site_a in level_a and site_b in level_b.
Operator embed_pair_projector(int site_a, int level_a, int site_b, int level_b,
                              const LevelSpace& space);

// exp(-i H t) through Hermitian eigendecomposition. H in rad/us, t in us.
Operator propagator(const HermitianOperator& hamiltonian, double t_us);

double population(const QuantumState& state, int site, int level);

// Un-normalized amplitudes on the remaining sites once the conditioned sites
// are fixed to the given levels. Remaining sites keep their relative order.
Vector branch_amplitude(const QuantumState& state, std::span<const SiteLevel> conditioning);

Complex expectation(const QuantumState& state, const Operator& op);

// U|psi> for pure states, U rho U^dagger for density matrices.
QuantumState apply(const Operator& unitary, const QuantumState& state);

// |<a|b>|^2 for pure pairs, <a|rho|a> for pure/mixed, Uhlmann fidelity
// is not needed here and mixed/mixed pairs are rejected.
double fidelity(const QuantumState& a, const QuantumState& b);

// Reduced density matrix of one site.
Matrix reduced_density(const QuantumState& state, int site);

// Largest |U^dagger U - I| entry.
double unitarity_defect(const Matrix& u);

}  // namespace rydstab::qcore
