#include "rydstab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "rydstab/error.hpp"
#include "rydstab/units.hpp"

namespace rydstab::analysis {
namespace {

constexpr double kUndefinedContrast = 1e-9;

struct Point2 {
  double o;
  double r;
};

Point2 nearest_on_segment(Point2 p, Point2 a, Point2 b) {
  const double dx = b.o - a.o;
  const double dy = b.r - a.r;
  const double t = std::clamp(((p.o - a.o) * dx + (p.r - a.r) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
  return {a.o + t * dx, a.r + t * dy};
}

// Projection of (offset, amplitude) onto the triangle r <= min(o, 1 - o), r >= 0.
Point2 project_triangle(Point2 p) {
  if (p.r >= 0.0 && p.r <= p.o && p.r <= 1.0 - p.o) return p;
  const std::array<Point2, 3> v = {Point2{0.0, 0.0}, Point2{1.0, 0.0}, Point2{0.5, 0.5}};
  Point2 best{};
  double best_d = INFINITY;
  for (int e = 0; e < 3; ++e) {
    const Point2 q = nearest_on_segment(p, v[e], v[(e + 1) % 3]);
    const double d = std::hypot(q.o - p.o, q.r - p.r);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

// beta = (offset, a, b) with amplitude r = |(a, b)| = contrast / 2.
Eigen::Vector3d project(const Eigen::Vector3d& beta) {
  const double r = std::hypot(beta(1), beta(2));
  const Point2 q = project_triangle({beta(0), r});
  Eigen::Vector3d out;
  out(0) = q.o;
  if (r > 0.0) {
    out(1) = beta(1) * q.r / r;
    out(2) = beta(2) * q.r / r;
  } else {
    out(1) = q.r;
    out(2) = 0.0;
  }
  return out;
}

bool feasible(const Eigen::Vector3d& beta) {
  const double r = std::hypot(beta(1), beta(2));
  return r <= std::min(beta(0), 1.0 - beta(0)) + 1e-12;
}

void check_coverage(const std::vector<FringeSample>& samples) {
  std::vector<double> phases;
  for (const FringeSample& s : samples) {
    double p = std::fmod(s.phase_rad, kTwoPi);
    if (p < 0.0) p += kTwoPi;
    phases.push_back(p);
  }
  std::sort(phases.begin(), phases.end());
  std::vector<double> distinct;
  for (double p : phases) {
    if (distinct.empty() || p - distinct.back() > 1e-12) distinct.push_back(p);
  }
  if (distinct.size() > 1 && kTwoPi - distinct.back() + distinct.front() <= 1e-12) {
    distinct.pop_back();
  }
  if (distinct.size() < 4) {
    throw InvalidArgument("fit_fringe: need at least 4 distinct phases, got " +
                          std::to_string(distinct.size()));
  }
  double largest_gap = kTwoPi - distinct.back() + distinct.front();
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    largest_gap = std::max(largest_gap, distinct[i] - distinct[i - 1]);
  }
  if (largest_gap > kPi + 1e-12) {
    throw InvalidArgument("fit_fringe: phases must span at least pi");
  }
}

}  // namespace

FringeSample FringeSample::exact(double phase_rad, double probability) {
  return {phase_rad, probability, 0, 0};
}

FringeSample FringeSample::counts(double phase_rad, std::int64_t successes, std::int64_t shots) {
  if (shots <= 0 || successes < 0 || successes > shots) {
    throw InvalidArgument("FringeSample::counts: need 0 <= successes <= shots, shots > 0");
  }
  return {phase_rad, static_cast<double>(successes) / static_cast<double>(shots), shots, successes};
}

double ParamError::total() const noexcept { return std::hypot(bootstrap, fit); }

double FringeFit::evaluate(double phi) const noexcept {
  return offset + 0.5 * contrast * std::cos(phi - phase);
}

FringeFit fit_fringe(const std::vector<FringeSample>& samples) {
  check_coverage(samples);
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  Eigen::VectorXd w(n);
  bool all_counts = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const FringeSample& s = samples[i];
    x(i, 0) = 1.0;
    x(i, 1) = std::cos(s.phase_rad);
    x(i, 2) = std::sin(s.phase_rad);
    if (s.shots > 0) {
      const double shots = static_cast<double>(s.shots);
      double p = static_cast<double>(s.successes) / shots;
      y(i) = p;
      if (s.successes == 0 || s.successes == s.shots) p = (s.successes + 0.5) / (shots + 1.0);
      w(i) = shots / (p * (1.0 - p));
    } else {
      if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
        throw InvalidArgument("fit_fringe: probability outside [0, 1]");
      }
      y(i) = s.probability;
      w(i) = 1.0;
      all_counts = false;
    }
  }

  const Eigen::Matrix3d a = x.transpose() * w.asDiagonal() * x;
  const Eigen::Vector3d g = x.transpose() * w.asDiagonal() * y;
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw NumericalError("fit_fringe: singular normal equations");
  Eigen::Vector3d beta = ldlt.solve(g);

  FringeFit fit;
  if (!feasible(beta)) {
    fit.at_bound = true;
    // Accelerated projected gradient on the convex constrained problem.
    const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(a).eigenvalues().maxCoeff();
    Eigen::Vector3d current = project(beta);
    Eigen::Vector3d momentum = current;
    double t = 1.0;
    for (int iter = 0; iter < 200000; ++iter) {
      const Eigen::Vector3d next = project(momentum - (a * momentum - g) / lipschitz);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      momentum = next + ((t - 1.0) / t_next) * (next - current);
      const double change = (next - current).norm();
      current = next;
      t = t_next;
      if (change < 1e-15) break;
    }
    beta = current;
  }

  const Eigen::VectorXd residual = x * beta - y;
  fit.chi2 = residual.dot(w.asDiagonal() * residual);
  fit.dof = static_cast<int>(n) - 3;
  Eigen::Matrix3d cov = a.inverse();
  if (!all_counts) cov *= fit.dof > 0 ? fit.chi2 / fit.dof : 0.0;

  const double ca = beta(1);
  const double cb = beta(2);
  const double r = std::hypot(ca, cb);
  fit.offset = beta(0);
  fit.contrast = 2.0 * r;
  fit.offset_err.fit = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.phase_defined = fit.contrast >= kUndefinedContrast;
  if (fit.phase_defined) {
    fit.phase = wrap_phase(std::atan2(cb, ca));
    const Eigen::Vector3d dc(0.0, 2.0 * ca / r, 2.0 * cb / r);
    const Eigen::Vector3d dphi(0.0, -cb / (r * r), ca / (r * r));
    fit.contrast_err.fit = std::sqrt(std::max(dc.dot(cov * dc), 0.0));
    fit.phase_err.fit = std::sqrt(std::max(dphi.dot(cov * dphi), 0.0));
  } else {
    fit.phase = 0.0;
    fit.contrast_err.fit = 2.0 * std::sqrt(std::max(0.5 * (cov(1, 1) + cov(2, 2)), 0.0));
  }
  return fit;
}

double delta_phi(const FringeFit& ref, const FringeFit& probe) {
  if (!ref.phase_defined || !probe.phase_defined) {
    throw InvalidArgument("delta_phi: fringe phase is undefined (zero contrast)");
  }
  return wrap_phase(probe.phase - ref.phase);
}

int parity(int n1) {
  if (n1 < 0) throw InvalidArgument("parity: n1 must be >= 0");
  return n1 % 2 == 0 ? 1 : -1;
}

ContrastDecay contrast_decay_fit(const std::vector<ContrastPoint>& points) {
  if (points.size() < 3) throw InvalidArgument("contrast_decay_fit: need at least 3 points");
  bool any_error = false;
  bool all_error = true;
  for (const ContrastPoint& p : points) {
    if (p.n < 0) throw InvalidArgument("contrast_decay_fit: n must be >= 0");
    if (!(p.contrast > 0.0)) {
      throw InvalidArgument("contrast_decay_fit: contrast must be > 0 (n = " + std::to_string(p.n) +
                            ")");
    }
    if (p.error < 0.0) throw InvalidArgument("contrast_decay_fit: error must be >= 0");
    any_error = any_error || p.error > 0.0;
    all_error = all_error && p.error > 0.0;
  }
  if (any_error && !all_error) {
    throw InvalidArgument("contrast_decay_fit: give an error for every point or for none");
  }
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const ContrastPoint& p : points) {
    const double wgt = all_error ? std::pow(p.contrast / p.error, 2) : 1.0;
    const double xi = p.n;
    const double yi = std::log(p.contrast);
    sw += wgt;
    sx += wgt * xi;
    sy += wgt * yi;
    sxx += wgt * xi * xi;
    sxy += wgt * xi * yi;
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) throw InvalidArgument("contrast_decay_fit: need at least two distinct n");
  const double slope = (sw * sxy - sx * sy) / det;
  const double intercept = (sxx * sy - sx * sxy) / det;
  double var_slope = sw / det;
  double var_intercept = sxx / det;
  if (!all_error) {
    double rss = 0.0;
    for (const ContrastPoint& p : points) {
      rss += std::pow(std::log(p.contrast) - intercept - slope * p.n, 2);
    }
    const double scale = rss / static_cast<double>(points.size() - 2);
    var_slope *= scale;
    var_intercept *= scale;
  }
  ContrastDecay out;
  out.fidelity = std::exp(slope);
  out.fidelity_err = out.fidelity * std::sqrt(var_slope);
  out.c0 = std::exp(intercept);
  out.c0_err = out.c0 * std::sqrt(var_intercept);
  return out;
}

std::vector<CorrectedValue> correct_contrast(const std::vector<double>& raw, double reference) {
  if (!(reference > 0.0 && reference <= 1.0)) {
    throw InvalidArgument("correct_contrast: reference contrast must be in (0, 1]");
  }
  std::vector<CorrectedValue> out;
  out.reserve(raw.size());
  for (double v : raw) {
    const double c = 0.5 + (v - 0.5) / reference;
    const double clipped = std::clamp(c, 0.0, 1.0);
    out.push_back({clipped, clipped != c});
  }
  return out;
}

std::vector<double> uncorrect_contrast(const std::vector<double>& corrected, double reference) {
  if (!(reference > 0.0 && reference <= 1.0)) {
    throw InvalidArgument("uncorrect_contrast: reference contrast must be in (0, 1]");
  }
  std::vector<double> out;
  out.reserve(corrected.size());
  for (double c : corrected) out.push_back(0.5 + (c - 0.5) * reference);
  return out;
}

OperatingPoint operating_point(const std::vector<FringeFit>& even, const std::vector<FringeFit>& odd,
                               double grid_step) {
  if (even.empty() || odd.empty()) {
    throw InvalidArgument("operating_point: need at least one fit per sector");
  }
  if (!(grid_step > 0.0)) throw InvalidArgument("operating_point: grid step must be > 0");
  const auto points = static_cast<long>(std::ceil(kTwoPi / grid_step));
  OperatingPoint best;
  best.gap = -INFINITY;
  for (long k = 0; k < points; ++k) {
    const double phi = k * grid_step;
    double even_min = INFINITY, even_max = -INFINITY, even_sum = 0.0;
    double odd_min = INFINITY, odd_max = -INFINITY, odd_sum = 0.0;
    for (const FringeFit& f : even) {
      const double p = f.evaluate(phi);
      even_min = std::min(even_min, p);
      even_max = std::max(even_max, p);
      even_sum += p;
    }
    for (const FringeFit& f : odd) {
      const double p = f.evaluate(phi);
      odd_min = std::min(odd_min, p);
      odd_max = std::max(odd_max, p);
      odd_sum += p;
    }
    const double even_high_gap = even_min - odd_max;
    const double odd_high_gap = odd_min - even_max;
    const double gap = std::max(even_high_gap, odd_high_gap);
    if (gap > best.gap + 1e-15) {
      best.phase = phi;
      best.gap = gap;
      best.even_high = even_high_gap >= odd_high_gap;
      best.mean_gap = std::abs(even_sum / even.size() - odd_sum / odd.size());
    }
  }
  best.separated = best.gap > 0.0;
  return best;
}

ParitySummary parity_summary(const std::vector<ParityObservation>& observations, bool even_high) {
  std::map<std::pair<int, int>, ParityCell> cells;
  ParitySummary out;
  for (const ParityObservation& o : observations) {
    if (o.n1 < 0 || o.n1 > o.n_loaded) throw InvalidArgument("parity_summary: invalid n1");
    ParityCell& c = cells[{o.n_loaded, o.n1}];
    c.n_loaded = o.n_loaded;
    c.n1 = o.n1;
    c.predicted_sign = parity(o.n1);
    ++c.shots;
    if (o.ancilla_survived) ++c.survivors;
    const int inferred = (o.ancilla_survived == even_high) ? 1 : -1;
    ++out.total;
    if (inferred == parity(o.n1)) ++out.correct;
  }
  for (auto& [key, c] : cells) {
    c.frequency = static_cast<double>(c.survivors) / static_cast<double>(c.shots);
    c.error = std::sqrt(c.frequency * (1.0 - c.frequency) / static_cast<double>(c.shots));
    out.cells.push_back(c);
  }
  out.accuracy = out.total > 0 ? static_cast<double>(out.correct) / static_cast<double>(out.total) : 0.0;
  return out;
}

}  // namespace rydstab::analysis
