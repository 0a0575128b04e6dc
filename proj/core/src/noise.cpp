#include "rydstab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include "rydstab/error.hpp"
#include "rydstab/units.hpp"

namespace rydstab::noise {

using system::AtomSystem;
using system::Role;

double SpeciesNoise::background_loss() const noexcept {
  return 1.0 - (1.0 - scattering_loss) * (1.0 - imaging_loss);
}

NoiseModel NoiseModel::none() {
  NoiseModel m;
  m.ancilla = {kInfinity, kInfinity, 0.0, 0.0, 1.3};
  m.data = {kInfinity, kInfinity, 0.0, 0.0, 0.918};
  m.gate_infidelity_data_2pi = 0.0;
  m.v_fluctuation_fraction = 0.0;
  m.spam = 0.0;
  m.blast_infidelity = 0.0;
  m.omega_gradient_per_um = 0.0;
  return m;
}

void NoiseModel::validate() const {
  auto probability = [](double p, const std::string& field) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument(field + " must be a probability in [0, 1]");
    }
  };
  auto positive_time = [](double t, const std::string& field) {
    if (!(t > 0.0)) throw InvalidArgument(field + " must be > 0 (use inf to disable)");
  };
  for (const auto& [s, name] : {std::pair{&ancilla, "ancilla"}, std::pair{&data, "data"}}) {
    const std::string p = std::string("noise.") + name + ".";
    positive_time(s->t2_star_us, p + "t2_star");
    positive_time(s->rabi_tau_us, p + "rabi_tau");
    probability(s->scattering_loss, p + "scattering_loss");
    probability(s->imaging_loss, p + "imaging_loss");
    if (!(s->calibration_omega_mhz > 0.0)) {
      throw InvalidArgument(p + "calibration_omega must be > 0");
    }
  }
  probability(gate_infidelity_data_2pi, "noise.gate_infidelity_data_2pi");
  probability(spam, "noise.spam");
  probability(blast_infidelity, "noise.blast_infidelity");
  if (!(v_fluctuation_fraction >= 0.0 && v_fluctuation_fraction <= 1.0)) {
    throw InvalidArgument("noise.v_fluctuation_fraction must be in [0, 1]");
  }
  if (!std::isfinite(omega_gradient_per_um)) {
    throw InvalidArgument("noise.omega_gradient_per_um must be finite");
  }
}

const SpeciesNoise& NoiseModel::species(Role role) const noexcept {
  return role == Role::kAncilla ? ancilla : data;
}

dynamics::SurvivalModel NoiseModel::survival_model() const noexcept {
  return {ancilla.background_loss(), data.background_loss(), blast_infidelity};
}

double t2star_to_sigma(double t2_star_us) {
  if (!(t2_star_us > 0.0)) throw InvalidArgument("t2star_to_sigma: T2* must be > 0");
  if (std::isinf(t2_star_us)) return 0.0;
  return 1.0 / (std::sqrt(2.0) * kPi * t2_star_us);
}

double rabi_envelope_tau(Role role, double omega_mhz, double rate, double duration_us) {
  if (!(omega_mhz > 0.0) || !(duration_us > 0.0) || !(rate >= 0.0)) {
    throw InvalidArgument("rabi_envelope_tau: omega, duration > 0 and rate >= 0 required");
  }
  const AtomSystem atom = AtomSystem::single_atom(role);
  const system::SpeciesParams& sp = atom.species(role);

  // Eight samples per half period put a sample on every extremum.
  const double sample = 1.0 / (16.0 * omega_mhz);
  const auto samples = static_cast<int>(std::ceil(duration_us / sample));
  std::vector<pulse::PulseSegment> segments(
      samples, pulse::PulseSegment::drive(role == Role::kAncilla ? pulse::Target::kAncilla
                                                                 : pulse::Target::kData,
                                          omega_mhz, 0.0, 0.0, sample));
  const pulse::PulseSequence seq(std::move(segments), "rabi");
  std::vector<dynamics::CollapseChannel> channels;
  if (rate > 0.0) channels.push_back(dynamics::CollapseChannel::rydberg_dephasing(atom, 0, rate));

  dynamics::LindbladOptions opts;
  opts.max_step_us = 1.0 / (50.0 * omega_mhz);
  opts.record_trace = true;
  const dynamics::EvolutionResult res = dynamics::evolve_lindblad(
      dynamics::initial_state(atom, dynamics::DataPrep::kSiteLevels), seq, atom, channels, opts);

  std::vector<double> amp(samples + 1);
  amp[0] = 0.5;
  for (int i = 0; i < samples; ++i) {
    amp[i + 1] = std::abs(qcore::population(res.trace[i], 0, sp.coupled_level) - 0.5);
  }
  std::vector<double> t;
  std::vector<double> y;
  for (int i = 0; i <= samples; ++i) {
    const bool left = i == 0 || amp[i] >= amp[i - 1];
    const bool right = i == samples || amp[i] >= amp[i + 1];
    if (left && right && amp[i] > 1e-12) {
      t.push_back(i * sample);
      y.push_back(std::log(amp[i]));
    }
  }
  if (t.size() < 3) throw NumericalError("rabi_envelope_tau: too few extrema to fit");
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - mt) * (y[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  const double slope = sxy / sxx;
  // Integration error alone leaves a tiny slope.
  if (-slope * duration_us < 1e-5) return kInfinity;
  return -1.0 / slope;
}

double calibrate_dephasing_rate(double target_tau_us, double omega_mhz, Role role,
                                double tolerance) {
  if (!(target_tau_us > 0.0) || !(omega_mhz > 0.0)) {
    throw InvalidArgument("calibrate_dephasing_rate: tau and omega must be > 0");
  }
  if (std::isinf(target_tau_us)) return 0.0;
  const double duration = 2.0 * target_tau_us;
  auto tau_at = [&](double rate) { return rabi_envelope_tau(role, omega_mhz, rate, duration); };

  double lo = 0.2 / target_tau_us;
  double hi = 20.0 / target_tau_us;
  const double tau_lo = tau_at(lo);
  const double tau_hi = tau_at(hi);
  if (!(tau_lo > target_tau_us && tau_hi < target_tau_us)) {
    std::ostringstream msg;
    msg << "calibrate_dephasing_rate: rates [" << lo << ", " << hi << "] /us give tau ["
        << tau_lo << ", " << tau_hi << "] us, which does not bracket " << target_tau_us;
    throw NumericalError(msg.str());
  }
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = std::sqrt(lo * hi);
    const double tau = tau_at(mid);
    if (std::abs(tau - target_tau_us) <= 0.1 * tolerance * target_tau_us) return mid;
    (tau > target_tau_us ? lo : hi) = mid;
    if (hi / lo - 1.0 < 1e-6) break;
  }
  const double rate = std::sqrt(lo * hi);
  if (std::abs(tau_at(rate) - target_tau_us) > tolerance * target_tau_us) {
    throw NumericalError("calibrate_dephasing_rate: bisection did not converge");
  }
  return rate;
}

double species_dephasing_rate(const NoiseModel& model, Role role) {
  const SpeciesNoise& s = model.species(role);
  if (std::isinf(s.rabi_tau_us)) return 0.0;
  static std::mutex mutex;
  static std::map<std::tuple<double, double, int>, double> cache;
  const auto key = std::make_tuple(s.rabi_tau_us, s.calibration_omega_mhz, static_cast<int>(role));
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double rate = calibrate_dephasing_rate(s.rabi_tau_us, s.calibration_omega_mhz, role);
  std::lock_guard lock(mutex);
  cache.emplace(key, rate);
  return rate;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t shot, std::uint64_t purpose,
                          std::uint64_t index) {
  // splitmix64 finalizer folded over the four keys.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed);
  h = mix(h ^ shot);
  h = mix(h ^ purpose);
  return mix(h ^ index);
}

namespace {

std::mt19937_64 engine(std::uint64_t seed, std::uint64_t shot, Stream purpose,
                       std::uint64_t index) {
  return std::mt19937_64(stream_seed(seed, shot, static_cast<std::uint64_t>(purpose), index));
}

}  // namespace

ShotDraw draw_shot(const NoiseModel& model, const AtomSystem& system, const LoadingSpec& loading,
                   std::uint64_t seed, std::uint64_t shot) {
  const int n = system.num_sites();
  ShotDraw d;
  d.loaded.resize(n);
  d.detuning_offsets_mhz.assign(n, 0.0);
  d.pair_scales.assign(system.num_pairs(), 1.0);
  d.spam_flip.assign(n, false);
  d.gate_loss.assign(n, false);

  const std::vector<int> data = system.data_sites();
  for (int i = 0; i < n; ++i) d.loaded[i] = system.sites()[i].loaded;
  switch (loading.kind) {
    case LoadingSpec::Kind::kAsConfigured:
      break;
    case LoadingSpec::Kind::kBernoulli:
      if (!(loading.probability >= 0.0 && loading.probability <= 1.0)) {
        throw InvalidArgument("loading probability must be in [0, 1]");
      }
      for (int site : data) {
        auto rng = engine(seed, shot, Stream::kLoading, site);
        d.loaded[site] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < loading.probability;
      }
      break;
    case LoadingSpec::Kind::kFixedCount: {
      if (loading.count < 0 || loading.count > static_cast<int>(data.size())) {
        throw InvalidArgument("loading count out of range");
      }
      std::vector<int> order = data;
      auto rng = engine(seed, shot, Stream::kLoading, 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t k = 0; k < order.size(); ++k) {
        d.loaded[order[k]] = static_cast<int>(k) < loading.count;
      }
      break;
    }
  }

  for (int i = 0; i < n; ++i) {
    const Role role = system.sites()[i].role;
    const double sigma = t2star_to_sigma(model.species(role).t2_star_us);
    if (sigma > 0.0) {
      auto rng = engine(seed, shot, Stream::kDetuning, i);
      d.detuning_offsets_mhz[i] = std::normal_distribution<double>(0.0, sigma)(rng);
    }
    if (role == Role::kData) {
      if (model.spam > 0.0) {
        auto rng = engine(seed, shot, Stream::kSpam, i);
        d.spam_flip[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < model.spam;
      }
      if (model.data_damping == DataDamping::kClassicalLoss && model.gate_infidelity_data_2pi > 0.0) {
        auto rng = engine(seed, shot, Stream::kGateLoss, i);
        d.gate_loss[i] =
            std::uniform_real_distribution<double>(0.0, 1.0)(rng) < model.gate_infidelity_data_2pi;
      }
    }
  }

  const double f = model.v_fluctuation_fraction;
  if (f > 0.0) {
    for (int p = 0; p < system.num_pairs(); ++p) {
      auto rng = engine(seed, shot, Stream::kPairs, p);
      double scale = 1.0;
      if (model.v_distribution == VDistribution::kUniform) {
        scale = std::uniform_real_distribution<double>(1.0 - f, 1.0 + f)(rng);
      } else {
        scale = std::max(0.0, 1.0 + f * std::normal_distribution<double>(0.0, 1.0)(rng));
      }
      d.pair_scales[p] = scale;
    }
  }
  return d;
}

}  // namespace rydstab::noise
