#include "rydstab/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "rydstab/error.hpp"
#include "rydstab/spectral.hpp"

namespace rydstab::qcore {
namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_site(const LevelSpace& space, int site) {
  if (site < 0 || site >= space.num_sites()) {
    throw InvalidArgument("site " + std::to_string(site) + " out of range for " +
                          std::to_string(space.num_sites()) + "-site space");
  }
}

void require_level(const LevelSpace& space, int site, int level) {
  require_site(space, site);
  if (level < 0 || level >= space.dim(site)) {
    throw InvalidArgument("level " + std::to_string(level) + " out of range for site " +
                          std::to_string(site) + " (dim " + std::to_string(space.dim(site)) +
                          ")");
  }
}

void require_same_space(const LevelSpace& a, const LevelSpace& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(std::string(what) + ": level spaces differ");
}

}  // namespace

LevelSpace::LevelSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidArgument("LevelSpace needs at least one site");
  long long total = 1;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 2) {
      throw InvalidArgument("site " + std::to_string(i) + " has dimension " +
                            std::to_string(dims_[i]) + " (< 2)");
    }
    total *= dims_[i];
    if (total > kMaxTotalDim) {
      throw InvalidArgument("total dimension exceeds " + std::to_string(kMaxTotalDim));
    }
  }
  total_ = static_cast<int>(total);
  strides_.assign(dims_.size(), 1);
  for (int i = static_cast<int>(dims_.size()) - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * dims_[i + 1];
  }
}

int LevelSpace::dim(int site) const {
  if (site < 0 || site >= num_sites()) throw InvalidArgument("site index out of range");
  return dims_[site];
}

int LevelSpace::stride(int site) const {
  if (site < 0 || site >= num_sites()) throw InvalidArgument("site index out of range");
  return strides_[site];
}

int LevelSpace::level_of(int index, int site) const {
  return (index / stride(site)) % dims_[site];
}

int LevelSpace::index_of(std::span<const int> levels) const {
  if (static_cast<int>(levels.size()) != num_sites()) {
    throw InvalidArgument("index_of: expected " + std::to_string(num_sites()) + " levels");
  }
  int index = 0;
  for (int s = 0; s < num_sites(); ++s) {
    if (levels[s] < 0 || levels[s] >= dims_[s]) {
      throw InvalidArgument("index_of: level out of range at site " + std::to_string(s));
    }
    index += levels[s] * strides_[s];
  }
  return index;
}

Operator::Operator(LevelSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.total_dim() || matrix_.cols() != space_.total_dim()) {
    throw InvalidArgument("operator matrix does not match level space dimension");
  }
}

Operator Operator::identity(const LevelSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()));
}

Operator Operator::operator*(const Operator& rhs) const {
  require_same_space(space_, rhs.space_, "operator product");
  return Operator(space_, matrix_ * rhs.matrix_);
}

Operator Operator::operator+(const Operator& rhs) const {
  require_same_space(space_, rhs.space_, "operator sum");
  return Operator(space_, matrix_ + rhs.matrix_);
}

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint()); }

HermitianOperator::HermitianOperator(LevelSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const int n = space_.total_dim();
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw InvalidArgument("Hamiltonian matrix does not match level space dimension");
  }
  const double scale = std::max(1.0, max_abs(matrix_));
  const double defect = max_abs(matrix_ - matrix_.adjoint());
  if (defect > kTolerance * scale) {
    std::ostringstream msg;
    msg << "operator is not Hermitian (max |H - H^dagger| = " << defect << ")";
    throw InvalidArgument(msg.str());
  }
}

QuantumState::QuantumState(LevelSpace space, std::variant<Vector, Matrix> repr)
    : space_(std::move(space)), repr_(std::move(repr)) {}

QuantumState QuantumState::from_vector(LevelSpace space, Vector amplitudes, StateTolerance tol) {
  if (amplitudes.size() != space.total_dim()) {
    throw InvalidArgument("state vector length does not match level space");
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > tol.norm) {
    std::ostringstream msg;
    msg << "state vector is not normalized (norm = " << norm << ")";
    throw InvalidArgument(msg.str());
  }
  return QuantumState(std::move(space), std::move(amplitudes));
}

QuantumState QuantumState::from_density(LevelSpace space, Matrix rho, StateTolerance tol) {
  const int n = space.total_dim();
  if (rho.rows() != n || rho.cols() != n) {
    throw InvalidArgument("density matrix does not match level space");
  }
  if (max_abs(rho - rho.adjoint()) > tol.hermiticity) {
    throw InvalidArgument("density matrix is not Hermitian");
  }
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > tol.trace) {
    std::ostringstream msg;
    msg << "density matrix trace is " << trace << ", expected 1";
    throw InvalidArgument(msg.str());
  }
  const Matrix hermitian = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < tol.eigenvalue_floor) {
    std::ostringstream msg;
    msg << "density matrix has negative eigenvalue " << solver.eigenvalues().minCoeff();
    throw InvalidArgument(msg.str());
  }
  return QuantumState(std::move(space), std::move(rho));
}

QuantumState QuantumState::basis(const LevelSpace& space, std::span<const int> levels) {
  Vector psi = Vector::Zero(space.total_dim());
  psi(space.index_of(levels)) = 1.0;
  return QuantumState(space, std::move(psi));
}

QuantumState QuantumState::product(const LevelSpace& space, std::span<const Vector> site_states) {
  if (static_cast<int>(site_states.size()) != space.num_sites()) {
    throw InvalidArgument("product state needs one vector per site");
  }
  Vector psi = Vector::Ones(1);
  for (int s = 0; s < space.num_sites(); ++s) {
    const Vector& local = site_states[s];
    if (local.size() != space.dim(s)) {
      throw InvalidArgument("product state: wrong dimension at site " + std::to_string(s));
    }
    Vector next(psi.size() * local.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next.segment(i * local.size(), local.size()) = psi(i) * local;
    }
    psi = std::move(next);
  }
  return from_vector(space, std::move(psi));
}

const Vector& QuantumState::amplitudes() const {
  if (!is_pure()) throw InvalidArgument("state is a density matrix, not a pure state");
  return std::get<Vector>(repr_);
}

Matrix QuantumState::density() const {
  if (is_pure()) {
    const Vector& psi = std::get<Vector>(repr_);
    return psi * psi.adjoint();
  }
  return std::get<Matrix>(repr_);
}

QuantumState QuantumState::as_density() const { return QuantumState(space_, density()); }

Eigen::VectorXd QuantumState::probabilities() const {
  if (is_pure()) return std::get<Vector>(repr_).cwiseAbs2();
  return std::get<Matrix>(repr_).diagonal().real();
}

Operator embed_single_site(const Matrix& op, int site, const LevelSpace& space) {
  require_site(space, site);
  if (op.rows() != space.dim(site) || op.cols() != space.dim(site)) {
    throw InvalidArgument("embed_single_site: operator is " + std::to_string(op.rows()) + "x" +
                          std::to_string(op.cols()) + " but site " + std::to_string(site) +
                          " has dimension " + std::to_string(space.dim(site)));
  }
  const int n = space.total_dim();
  const int stride = space.stride(site);
  const int d = space.dim(site);
  Matrix out = Matrix::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const int l_col = (col / stride) % d;
    const int base = col - l_col * stride;
    for (int l_row = 0; l_row < d; ++l_row) {
      const Complex value = op(l_row, l_col);
      if (value != Complex(0.0)) out(base + l_row * stride, col) = value;
    }
  }
  return Operator(space, std::move(out));
}

Operator embed_pair_projector(int site_a, int level_a, int site_b, int level_b,
                              const LevelSpace& space) {
  require_level(space, site_a, level_a);
  require_level(space, site_b, level_b);
  if (site_a == site_b) {
    throw InvalidArgument("embed_pair_projector: both levels refer to site " +
                          std::to_string(site_a));
  }
  const int n = space.total_dim();
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (space.level_of(i, site_a) == level_a && space.level_of(i, site_b) == level_b) {
      out(i, i) = 1.0;
    }
  }
  return Operator(space, std::move(out));
}

Operator propagator(const HermitianOperator& hamiltonian, double t_us) {
  if (!(t_us >= 0.0)) throw InvalidArgument("propagator: duration must be >= 0");
  return Operator(hamiltonian.space(), SpectralPropagator(hamiltonian).unitary(t_us));
}

double population(const QuantumState& state, int site, int level) {
  const LevelSpace& space = state.space();
  require_level(space, site, level);
  const Eigen::VectorXd probs = state.probabilities();
  double total = 0.0;
  for (int i = 0; i < space.total_dim(); ++i) {
    if (space.level_of(i, site) == level) total += probs(i);
  }
  return std::clamp(total, 0.0, 1.0);
}

Vector branch_amplitude(const QuantumState& state, std::span<const SiteLevel> conditioning) {
  if (!state.is_pure()) {
    throw InvalidArgument("branch_amplitude needs a pure state; got a density matrix");
  }
  const LevelSpace& space = state.space();
  std::vector<int> fixed(space.num_sites(), -1);
  for (const SiteLevel& c : conditioning) {
    require_level(space, c.site, c.level);
    if (fixed[c.site] != -1) {
      throw InvalidArgument("branch_amplitude: site " + std::to_string(c.site) +
                            " conditioned twice");
    }
    fixed[c.site] = c.level;
  }
  int remaining_dim = 1;
  for (int s = 0; s < space.num_sites(); ++s) {
    if (fixed[s] == -1) remaining_dim *= space.dim(s);
  }
  const Vector& psi = state.amplitudes();
  Vector out = Vector::Zero(remaining_dim);
  for (int i = 0; i < space.total_dim(); ++i) {
    bool match = true;
    int reduced = 0;
    for (int s = 0; s < space.num_sites(); ++s) {
      const int l = space.level_of(i, s);
      if (fixed[s] == -1) {
        reduced = reduced * space.dim(s) + l;
      } else if (fixed[s] != l) {
        match = false;
        break;
      }
    }
    if (match) out(reduced) = psi(i);
  }
  return out;
}

Complex expectation(const QuantumState& state, const Operator& op) {
  require_same_space(state.space(), op.space(), "expectation");
  if (state.is_pure()) {
    const Vector& psi = state.amplitudes();
    return psi.dot(op.matrix() * psi);
  }
  return (state.density() * op.matrix()).trace();
}

QuantumState apply(const Operator& unitary, const QuantumState& state) {
  require_same_space(state.space(), unitary.space(), "apply");
  const StateTolerance loose{1e-9, 1e-9, 1e-9, -1e-9};
  if (state.is_pure()) {
    return QuantumState::from_vector(state.space(), unitary.matrix() * state.amplitudes(), loose);
  }
  const Matrix& u = unitary.matrix();
  return QuantumState::from_density(state.space(), u * state.density() * u.adjoint(), loose);
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  require_same_space(a.space(), b.space(), "fidelity");
  if (a.is_pure() && b.is_pure()) return std::norm(a.amplitudes().dot(b.amplitudes()));
  if (a.is_pure()) return a.amplitudes().dot(b.density() * a.amplitudes()).real();
  if (b.is_pure()) return b.amplitudes().dot(a.density() * b.amplitudes()).real();
  throw InvalidArgument("fidelity between two mixed states is not supported");
}

Matrix reduced_density(const QuantumState& state, int site) {
  const LevelSpace& space = state.space();
  require_site(space, site);
  const int d = space.dim(site);
  const int stride = space.stride(site);
  const Matrix rho = state.density();
  Matrix out = Matrix::Zero(d, d);
  for (int i = 0; i < space.total_dim(); ++i) {
    const int li = (i / stride) % d;
    const int base = i - li * stride;
    for (int lj = 0; lj < d; ++lj) {
      out(li, lj) += rho(i, base + lj * stride);
    }
  }
  return out;
}

double unitarity_defect(const Matrix& u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

}  // namespace rydstab::qcore
