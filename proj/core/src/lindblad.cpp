#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydstab/dynamics.hpp"
#include "rydstab/error.hpp"
#include "rydstab/spectral.hpp"
#include "rydstab/units.hpp"

namespace rydstab::dynamics {

using qcore::Complex;
using qcore::Matrix;
using qcore::QuantumState;
using system::AtomSystem;

namespace {

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r != c && m(r, c) != Complex(0.0)) return false;
    }
  }
  return true;
}

bool channel_active(const CollapseChannel& ch, const pulse::PulseSegment& seg) {
  if (!ch.active_during) return true;
  return seg.kind == pulse::SegmentKind::kDrive && seg.target == *ch.active_during;
}

// Bound on the Hamiltonian's spectral radius in MHz (largest absolute row sum),
// for the step-size rule. Interaction and detuning terms add up over atoms.
double max_frequency(const Matrix& h) {
  return h.cwiseAbs().rowwise().sum().maxCoeff() / kTwoPi;
}

// Dissipative part of the master equation for a fixed set of channels.
class Dissipator {
 public:
  Dissipator(const std::vector<Matrix>& dense_ops, Eigen::MatrixXd diagonal_factor)
      : diag_(std::move(diagonal_factor)) {
    for (const Matrix& l : dense_ops) {
      dense_.push_back({l, l.adjoint(), 0.5 * l.adjoint() * l});
    }
  }

  bool empty() const noexcept { return diag_.size() == 0 && dense_.empty(); }

  // Total channel rate, for the step-size rule.
  double rate() const {
    double r = diag_.size() > 0 ? diag_.cwiseAbs().maxCoeff() : 0.0;
    for (const Dense& d : dense_) r += 2.0 * d.half_ldl.cwiseAbs().rowwise().sum().maxCoeff();
    return r;
  }

  Matrix operator()(const Matrix& rho) const {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    if (diag_.size() > 0) out.array() += diag_.array().cast<Complex>() * rho.array();
    for (const Dense& d : dense_) {
      const Matrix k = d.half_ldl * rho;
      out += d.l * rho * d.ldag - k - k.adjoint();
    }
    return out;
  }

 private:
  struct Dense {
    Matrix l;
    Matrix ldag;
    Matrix half_ldl;
  };
  Eigen::MatrixXd diag_;
  std::vector<Dense> dense_;
};

}  // namespace

EvolutionResult evolve_lindblad(const QuantumState& initial, const pulse::PulseSequence& sequence,
                                const AtomSystem& system,
                                const std::vector<CollapseChannel>& channels,
                                const LindbladOptions& options) {
  if (!(initial.space() == system.space())) {
    throw InvalidArgument("initial state does not match the system's level space");
  }
  const qcore::LevelSpace& space = system.space();
  const int n = space.total_dim();

  // Embedded channel operators; unloaded sites drop out.
  struct Embedded {
    const CollapseChannel* channel;
    Matrix op;  // sqrt(rate) L on the full space
    bool diagonal;
  };
  std::vector<Embedded> embedded;
  for (const CollapseChannel& ch : channels) {
    if (!(ch.rate >= 0.0)) throw InvalidArgument("collapse channel rate must be >= 0");
    if (ch.site < 0 || ch.site >= system.num_sites()) {
      throw InvalidArgument("collapse channel site " + std::to_string(ch.site) + " out of range");
    }
    const int h = system.hilbert_site(ch.site);
    if (h < 0 || ch.rate == 0.0) continue;
    Matrix op = std::sqrt(ch.rate) * qcore::embed_single_site(ch.op, h, space).matrix();
    const bool diag = is_diagonal(ch.op);
    embedded.push_back({&ch, std::move(op), diag});
  }

  Matrix rho = initial.density();
  EvolutionResult result{initial.as_density(), {}, 0.0};
  const qcore::StateTolerance tol{1e-9, 1e-9, options.trace_tolerance, -1e-7};

  for (const pulse::PulseSegment& seg : sequence.segments()) {
    if (seg.kind == pulse::SegmentKind::kInstant) {
      const Matrix u = instant_rotation(system, seg.target, seg.rotation_rad, seg.phase_rad).matrix();
      rho = u * rho * u.adjoint();
    } else if (seg.duration_us > 0.0) {
      const qcore::HermitianOperator hamiltonian = system::build_hamiltonian(system, drive_settings(seg));
      Eigen::MatrixXd diag_factor;
      std::vector<Matrix> dense;
      for (const Embedded& e : embedded) {
        if (!channel_active(*e.channel, seg)) continue;
        if (!e.diagonal) {
          dense.push_back(e.op);
          continue;
        }
        if (diag_factor.size() == 0) diag_factor = Eigen::MatrixXd::Zero(n, n);
        const Eigen::VectorXcd l = e.op.diagonal();
        for (int c = 0; c < n; ++c) {
          for (int r = 0; r < n; ++r) {
            diag_factor(r, c) +=
                (l(r) * std::conj(l(c))).real() - 0.5 * (std::norm(l(r)) + std::norm(l(c)));
          }
        }
      }
      const Dissipator dissipator(dense, std::move(diag_factor));
      const qcore::SpectralPropagator prop(hamiltonian);

      if (dissipator.empty()) {
        const Matrix u = prop.unitary(seg.duration_us);
        rho = u * rho * u.adjoint();
      } else {
        double step = options.max_step_us;
        if (step <= 0.0) {
          const double f = std::max(max_frequency(hamiltonian.matrix()), dissipator.rate() / kTwoPi);
          step = std::min(seg.duration_us / 20.0, 1.0 / (100.0 * f));
        }
        const auto steps = static_cast<long>(std::ceil(seg.duration_us / step - 1e-9));
        const double dt = seg.duration_us / static_cast<double>(steps);
        // RK4 in the interaction picture of the step: the unitary part is
        // exact, only the dissipator is integrated.
        const Matrix u_half = prop.unitary(0.5 * dt);
        const Matrix u = u_half * u_half;
        const Matrix u_half_dag = u_half.adjoint();
        const Matrix u_dag = u.adjoint();
        auto at_half = [&](const Matrix& x) {
          return Matrix(u_half_dag * dissipator(u_half * x * u_half_dag) * u_half);
        };
        auto at_end = [&](const Matrix& x) {
          return Matrix(u_dag * dissipator(u * x * u_dag) * u);
        };
        for (long s = 0; s < steps; ++s) {
          const Matrix k1 = dissipator(rho);
          const Matrix k2 = at_half(rho + (0.5 * dt) * k1);
          const Matrix k3 = at_half(rho + (0.5 * dt) * k2);
          const Matrix k4 = at_end(rho + dt * k3);
          rho = u * (rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)) * u_dag;
        }
      }
      rho = 0.5 * (rho + rho.adjoint());
      const double drift = std::abs(rho.trace().real() - 1.0);
      if (drift > options.trace_tolerance) {
        std::ostringstream msg;
        msg << "evolve_lindblad: trace drifted by " << drift << " in a " << seg.duration_us
            << " us segment; try a smaller max_step_us";
        throw NumericalError(msg.str());
      }
    }
    result.total_duration_us += seg.duration_us;
    if (options.record_trace) result.trace.push_back(QuantumState::from_density(space, rho, tol));
  }
  result.final_state = QuantumState::from_density(space, std::move(rho), tol);
  return result;
}

}  // namespace rydstab::dynamics
