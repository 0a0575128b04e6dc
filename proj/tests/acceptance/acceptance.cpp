// Acceptance checks 1-10. One PASS/FAIL line per criterion; exit status is
// the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracle.hpp"
#include "rydstab/analysis.hpp"
#include "rydstab/cli/repro.hpp"
#include "rydstab/cli/run.hpp"
#include "rydstab/cli/scenario.hpp"
#include "rydstab/dynamics.hpp"
#include "rydstab/noise.hpp"
#include "rydstab/pulse.hpp"
#include "rydstab/ramsey.hpp"
#include "rydstab/units.hpp"

using namespace rydstab;
using rydstab::system::AtomSystem;
using rydstab::system::Role;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

dynamics::Experiment readout(const AtomSystem& sys, pulse::ReadoutSpec spec) {
  return {sys,
          [spec](double phi) mutable {
            spec.ramsey_phase_rad = phi;
            return pulse::build_readout_sequence(spec);
          },
          dynamics::DataPrep::kSiteLevels, dynamics::MeasurementScheme::kRydbergLoss, true};
}

analysis::FringeFit exact_fit(const std::vector<dynamics::FringeRow>& rows) {
  std::vector<analysis::FringeSample> s;
  for (const auto& r : rows) s.push_back(analysis::FringeSample::exact(r.phase_rad, r.survival_prob));
  return analysis::fit_fringe(s);
}

double library_delta_phi(double v, const pulse::ReadoutSpec& spec, int points = 12) {
  const auto grid = dynamics::phase_grid(points);
  const auto probe = exact_fit(dynamics::ramsey_scan(readout(AtomSystem::two_atom(v), spec), grid, {}));
  const auto ref = exact_fit(dynamics::ramsey_scan(readout(AtomSystem::two_atom(v, false), spec), grid, {}));
  return analysis::delta_phi(ref, probe);
}

cli::Scenario repro_base(const std::string& id) {
  return cli::parse_scenario_text(cli::default_repro_config(id));
}

// 1. Compensation identity.
Outcome compensation() {
  double worst_closure = 0.0, worst_pred = 0.0, worst_sim = 0.0;
  for (double v : {0.5, 1.1, 2.3, 4.4}) {
    for (int n : {1, 2, 3}) {
      const auto c = pulse::solve_compensation(v, n);
      // Closure from the two generalized Rabi frequencies, written out.
      const double free = std::hypot(c.omega_mhz, c.delta_mhz);
      const double blocked = std::hypot(c.omega_mhz, c.delta_mhz - v);
      worst_closure = std::max(worst_closure, std::abs(blocked - n * free));
      worst_pred = std::max(worst_pred, std::abs(std::abs(pulse::predicted_delta_phi(c.delta_mhz, c.omega_mhz, v, n)) - kPi));
      pulse::ReadoutSpec spec;
      spec.gate = pulse::GateScheme::kCompensated;
      spec.v_mhz = v;
      spec.n = n;
      worst_sim = std::max(worst_sim, std::abs(std::abs(library_delta_phi(v, spec)) - kPi));
    }
  }
  return {worst_closure < 1e-12 && worst_pred < 1e-10 && worst_sim < 1e-6,
          "max closure " + fmt("%.2e", worst_closure) + " MHz, max ||pred|-pi| " + fmt("%.2e", worst_pred) +
              ", max ||sim|-pi| " + fmt("%.2e", worst_sim) + " rad"};
}

// 2. Resonant phase deficit.
Outcome resonant_deficit() {
  const double omega = 0.918;
  pulse::ReadoutSpec spec;
  spec.gate = pulse::GateScheme::kResonant;
  spec.omega_data_mhz = omega;
  const double sim = std::abs(library_delta_phi(1.1, spec));
  const double ref = std::abs(oracle::two_atom_delta_phi(5.0, omega, 0.0, 1.0 / omega, 1.1));
  std::vector<double> curve;
  for (double v = 0.5; v <= 4.5 + 1e-9; v += 0.5) curve.push_back(std::abs(library_delta_phi(v, spec)));
  bool monotone = true;
  for (std::size_t k = 1; k < curve.size(); ++k) monotone = monotone && curve[k] > curve[k - 1];
  monotone = monotone && curve.back() < kPi;
  const bool in_band = std::abs(sim / kPi - 0.54) <= 0.08;
  return {in_band && monotone && std::abs(sim - ref) < 1e-6,
          "dphi(1.1 MHz) = " + fmt("%.4f", sim / kPi) + " pi (band 0.54 +- 0.08), oracle " +
              fmt("%.4f", ref / kPi) + " pi, monotone to " + fmt("%.4f", curve.back() / kPi) + " pi: " +
              (monotone ? "yes" : "no")};
}

// 3. Blockade-limit truth table.
Outcome blockade_limit() {
  const double omega = 1.0;
  std::vector<double> fid;
  double oracle_gap = 0.0;
  for (double ratio : {1e1, 1e2, 1e3, 1e4}) {
    const double v = ratio * omega;
    pulse::ReadoutSpec spec;
    spec.gate = pulse::GateScheme::kResonant;
    spec.omega_data_mhz = omega;
    spec.instantaneous_ancilla = true;
    const auto seq = pulse::build_readout_sequence(spec);
    double worst = 1.0;
    for (int input : {system::level::kZero, system::level::kOne}) {
      const AtomSystem sys = AtomSystem::two_atom(v, true, input);
      const auto out = dynamics::evolve_unitary(dynamics::initial_state(sys, dynamics::DataPrep::kSiteLevels), seq, sys)
                           .final_state.amplitudes();
      // |0>|g> -> |0>|r>, |1>|g> -> |1>|g>
      const int target = input == system::level::kZero ? oracle::idx(1, 0) : oracle::idx(0, 1);
      const double f = std::norm(out(target));
      worst = std::min(worst, f);

      // Same sequence integrated by the oracle.
      oracle::Vec psi = oracle::Vec::Zero(6);
      psi(oracle::idx(0, input)) = 1.0;
      psi = oracle::rotate_ancilla(psi, kPi / 2, 0.0);
      oracle::Drive d;
      d.omega_d = omega;
      const int steps = static_cast<int>(std::ceil((1.0 / omega) * v * 50.0));
      psi = oracle::rk4(oracle::two_atom_h(d, v), psi, 1.0 / omega, steps);
      psi = oracle::rotate_ancilla(psi, kPi / 2, 0.0);
      oracle_gap = std::max(oracle_gap, std::abs(std::norm(psi(target)) - f));
    }
    fid.push_back(worst);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < fid.size(); ++k) monotone = monotone && fid[k] > fid[k - 1];
  std::string detail = "fidelity";
  for (double f : fid) detail += " " + fmt("%.8f", f);
  detail += " at V/Omega 1e1..1e4, oracle gap " + fmt("%.1e", oracle_gap);
  return {fid.back() > 0.999 && monotone && oracle_gap < 1e-6, detail};
}

double circular_mean(const std::vector<double>& a) {
  double s = 0.0, c = 0.0;
  for (double x : a) {
    s += std::sin(x);
    c += std::cos(x);
  }
  return std::atan2(s, c);
}

struct ParityPoint {
  analysis::OperatingPoint op;
  std::vector<analysis::FringeFit> fits;  // n = 0..4
};

ParityPoint plaquette_operating_point() {
  const cli::Scenario base = repro_base("fig3bcd");
  ParityPoint p;
  std::vector<analysis::FringeFit> even, odd;
  for (int n = 0; n <= 4; ++n) {
    const cli::FringeResult r = cli::run_fringe(cli::plaquette_pattern(base, n), false);
    p.fits.push_back(r.fit);
    (n % 2 == 0 ? even : odd).push_back(r.fit);
  }
  p.op = analysis::operating_point(even, odd);
  return p;
}

// 4. Plaquette parity sectors.
Outcome plaquette_parity() {
  const ParityPoint p = plaquette_operating_point();
  std::vector<double> even, odd;
  for (int n = 0; n <= 4; ++n) (n % 2 == 0 ? even : odd).push_back(p.fits[n].phase);
  const double me = circular_mean(even), mo = circular_mean(odd);
  double spread = 0.0;
  for (double x : even) spread = std::max(spread, std::abs(wrap_phase(x - me)));
  for (double x : odd) spread = std::max(spread, std::abs(wrap_phase(x - mo)));
  const double sep_err = std::abs(std::abs(wrap_phase(mo - me)) - kPi);

  // Exact expected accuracy over every loading pattern with data in |1>.
  const cli::Scenario base = repro_base("fig3bcd");
  double acc = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    cli::Scenario s = cli::plaquette_pattern(base, 0);
    s.system.data_loaded = {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)};
    const int n1 = __builtin_popcount(static_cast<unsigned>(mask));
    const auto row = dynamics::ramsey_scan(cli::build_experiment(s), {p.op.phase}, cli::scan_options(s))[0];
    const bool survive_means_even = p.op.even_high;
    const bool even = n1 % 2 == 0;
    acc += (even == survive_means_even) ? row.survival_prob : 1.0 - row.survival_prob;
  }
  acc /= 16.0;
  return {spread <= 0.15 && sep_err <= 0.15 && acc > 0.99,
          "max in-sector deviation " + fmt("%.4f", spread) + " rad, |sep - pi| " + fmt("%.4f", sep_err) +
              " rad, operating phase " + fmt("%.3f", p.op.phase) + " rad, accuracy " + fmt("%.5f", acc)};
}

// 5. Superposition inputs with blast readout.
Outcome superposition_projection() {
  const ParityPoint p = plaquette_operating_point();
  cli::Scenario s = repro_base("fig3bcd");
  s.system.layout = cli::Layout::kPlaquette;
  s.system.data_loaded = {true, true, true, true};
  s.noise_enabled = false;
  dynamics::Experiment exp = cli::build_experiment(s);
  exp.data_prep = dynamics::DataPrep::kPlus;
  exp.scheme = dynamics::MeasurementScheme::kBoth;
  exp.postselect_data_survival = false;
  noise::MonteCarloConfig cfg;
  cfg.shots_per_phase = 10000;
  cfg.seed = 17;
  cfg.loading.kind = noise::LoadingSpec::Kind::kBernoulli;
  cfg.loading.probability = 0.5;
  const auto mc = noise::run_monte_carlo(exp, {p.op.phase}, noise::NoiseModel::none(), cfg);
  std::vector<analysis::ParityObservation> obs;
  for (const auto& r : mc.records) {
    obs.push_back({r.measurement.n_loaded, r.measurement.n1, r.measurement.ancilla_survived});
  }
  const auto summary = analysis::parity_summary(obs, p.op.even_high);
  return {summary.accuracy > 0.97 && summary.total == 10000,
          "accuracy " + fmt("%.4f", summary.accuracy) + " over " + std::to_string(summary.total) + " shots"};
}

// 6a. Ramsey contrast under quasi-static detuning.
Outcome ramsey_t2star(double& fitted) {
  const AtomSystem atom = AtomSystem::single_atom(Role::kAncilla);
  noise::NoiseModel m = noise::NoiseModel::none();
  m.ancilla.t2_star_us = 3.4;
  const auto phases = dynamics::phase_grid(12);
  std::vector<double> t2, logc;
  for (double t = 0.0; t <= 4.0 + 1e-9; t += 0.5) {
    const dynamics::Experiment exp{atom, [t](double phi) { return pulse::build_ramsey_sequence(t, phi, 5.0, true); }};
    noise::MonteCarloConfig cfg;
    cfg.shots_per_phase = 4000;
    cfg.seed = 23;
    const auto mc = noise::run_monte_carlo(exp, phases, m, cfg);
    std::vector<analysis::FringeSample> s;
    for (const auto& r : mc.summary) s.push_back(analysis::FringeSample::counts(r.phase_rad, r.successes, r.shots));
    const double c = analysis::fit_fringe(s).contrast;
    t2.push_back(t * t);
    logc.push_back(std::log(c));
  }
  // log C = log C0 - t^2 / T2*^2
  const double n = static_cast<double>(t2.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < t2.size(); ++i) {
    mx += t2[i] / n;
    my += logc[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t2.size(); ++i) {
    sxy += (t2[i] - mx) * (logc[i] - my);
    sxx += (t2[i] - mx) * (t2[i] - mx);
  }
  fitted = 1.0 / std::sqrt(-sxy / sxx);
  return {std::abs(fitted / 3.4 - 1.0) <= 0.05, "T2* = " + fmt("%.3f", fitted) + " us"};
}

// 6b. Calibrated Rabi damping, checked on the density-matrix oracle.
Outcome rabi_envelopes() {
  const noise::NoiseModel m;
  const double rate_na = noise::species_dephasing_rate(m, Role::kAncilla);
  const double rate_cs = noise::species_dephasing_rate(m, Role::kData);
  const double tau_na = oracle::envelope_tau(m.ancilla.calibration_omega_mhz, rate_na, 24.0);
  const double tau_cs = oracle::envelope_tau(m.data.calibration_omega_mhz, rate_cs, 44.0);
  return {std::abs(tau_na / 12.0 - 1.0) <= 0.05 && std::abs(tau_cs / 22.0 - 1.0) <= 0.05,
          "tau Na " + fmt("%.3f", tau_na) + " us, Cs " + fmt("%.3f", tau_cs) + " us"};
}

// 7. Contrast decay under full noise.
Outcome contrast_decay() {
  const cli::ReproResult r = cli::run_repro("fig3bcd", repro_base("fig3bcd"));
  const double f = r.summary["fidelity_per_qubit"].get<double>();
  const double err = r.summary["fidelity_per_qubit_err"].get<double>();
  return {f >= 0.75 && f <= 0.90, "f = " + fmt("%.4f", f) + " +- " + fmt("%.4f", err)};
}

// 8. Robustness ordering.
Outcome robustness() {
  const cli::ReproResult r = cli::run_repro("figS4", repro_base("figS4"));
  const auto& s = r.summary["spread_over_pi"];
  const double s1 = s[0].get<double>(), s2 = s[1].get<double>(), s3 = s[2].get<double>();
  return {s1 > s2 && s2 > s3,
          "spread/pi n=1,2,3: " + fmt("%.4f", s1) + " " + fmt("%.4f", s2) + " " + fmt("%.4f", s3)};
}

// 9. |0> and unloaded sites give identical survival.
Outcome zero_equivalence() {
  const cli::ReproResult r = cli::run_repro("figS5", repro_base("figS5"));
  const double worst = r.summary["max_abs_diff"].get<double>();

  // Same comparison with dephasing channels on every atom.
  pulse::ReadoutSpec spec;
  const auto seq = pulse::build_readout_sequence(spec);
  const AtomSystem zero = AtomSystem::two_atom(1.1, true, system::level::kZero);
  const AtomSystem empty = AtomSystem::two_atom(1.1, false);
  auto channels = [](const AtomSystem& sys) {
    std::vector<dynamics::CollapseChannel> ch;
    for (int site : sys.loaded_sites()) ch.push_back(dynamics::CollapseChannel::rydberg_dephasing(sys, site, 0.3));
    return ch;
  };
  const auto rz = dynamics::evolve_lindblad(dynamics::initial_state(zero, dynamics::DataPrep::kSiteLevels), seq, zero, channels(zero));
  const auto re = dynamics::evolve_lindblad(dynamics::initial_state(empty, dynamics::DataPrep::kSiteLevels), seq, empty, channels(empty));
  const double lind = std::abs(
      dynamics::ancilla_survival(rz.final_state, zero, dynamics::MeasurementScheme::kRydbergLoss, true).ideal -
      dynamics::ancilla_survival(re.final_state, empty, dynamics::MeasurementScheme::kRydbergLoss, true).ideal);
  return {worst < 1e-9 && lind < 1e-9,
          "max |diff| over repro patterns " + fmt("%.1e", worst) + ", Lindblad two-atom " + fmt("%.1e", lind)};
}

// 10. Fit and bootstrap machinery.
Outcome statistics() {
  // Round trip on exact fringes.
  double worst_rt = 0.0;
  for (double o : {0.3, 0.5, 0.62}) {
    for (double phase : {-2.5, 0.4, 3.0}) {
      const double c = 0.8 * std::min(o, 1 - o) * 2.0;
      std::vector<analysis::FringeSample> s;
      for (int k = 0; k < 12; ++k) {
        const double phi = kTwoPi * k / 12;
        s.push_back(analysis::FringeSample::exact(phi, o + 0.5 * c * std::cos(phi - phase)));
      }
      const auto f = analysis::fit_fringe(s);
      worst_rt = std::max({worst_rt, std::abs(f.offset - o), std::abs(f.contrast - c), std::abs(wrap_phase(f.phase - phase))});
    }
  }

  // Bootstrap against the delta method on binomial draws.
  const double o = 0.5, c = 0.6, phase = 0.7;
  const int points = 16, shots = 400;
  std::vector<double> phis;
  std::vector<int> counts(points, shots);
  for (int k = 0; k < points; ++k) phis.push_back(kTwoPi * k / points);
  const Eigen::Matrix3d cov = oracle::delta_method_cov(phis, counts, o, c, phase);
  double worst_ratio = 0.0;
  bool exact_sum = true;
  for (unsigned seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::vector<analysis::FringeSample> s;
    for (int k = 0; k < points; ++k) {
      std::binomial_distribution<int> draw(shots, o + 0.5 * c * std::cos(phis[k] - phase));
      s.push_back(analysis::FringeSample::counts(phis[k], draw(rng), shots));
    }
    analysis::BootstrapOptions opts;
    opts.resamples = 300;
    opts.seed = seed;
    const auto b = analysis::bootstrap(s, opts);
    worst_ratio = std::max(worst_ratio, std::abs(b.fit.phase_err.bootstrap / std::sqrt(cov(2, 2)) - 1.0));
    for (const auto* e : {&b.fit.phase_err, &b.fit.contrast_err, &b.fit.offset_err}) {
      exact_sum = exact_sum && e->total() == std::hypot(e->bootstrap, e->fit);
    }
  }
  return {worst_rt < 1e-8 && worst_ratio <= 0.20 && exact_sum,
          "round trip " + fmt("%.1e", worst_rt) + ", max |xi_b/delta - 1| " + fmt("%.3f", worst_ratio) +
              ", xi quadrature exact: " + (exact_sum ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  double t2_fit = 0.0;
  const std::vector<Criterion> criteria = {
      {"1", "compensation identity", 10, compensation},
      {"2", "resonant phase deficit", 30, resonant_deficit},
      {"3", "blockade-limit truth table", 10, blockade_limit},
      {"4", "plaquette parity sectors", 120, plaquette_parity},
      {"5", "superposition-input projection", 120, superposition_projection},
      {"6a", "Ramsey T2* envelope", 60, [&] { return ramsey_t2star(t2_fit); }},
      {"6b", "calibrated Rabi envelopes", 60, rabi_envelopes},
      {"7", "contrast decay", 300, contrast_decay},
      {"8", "robustness ordering", 120, robustness},
      {"9", "|0>/unloaded equivalence", 60, zero_equivalence},
      {"10", "statistical machinery", 60, statistics},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %s (%s): %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
