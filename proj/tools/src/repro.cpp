#include "rydstab/cli/repro.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rydstab/cli/schema.hpp"
#include "rydstab/error.hpp"
#include "rydstab/pulse.hpp"
#include "rydstab/units.hpp"

namespace rydstab::cli {
namespace {

using pulse::GateScheme;

const std::map<std::string, std::string>& default_configs() {
  static const std::map<std::string, std::string> configs = {
      {"fig2f", R"(# Ancilla phase shift against the interaction strength, two atoms.
name: fig2f
gate:
  omega_data: 0.918
  ancilla_omega: 5.0
  n: 1
noise:
  enabled: false
  v_fluctuation_fraction: 0.2
run:
  mode: unitary
  phases: 12
)"},
      {"fig3bcd", R"(# Plaquette fringes per excited-data count, noiseless and with full noise.
name: fig3bcd
system:
  layout: plaquette
  side: 8.84
  data_level: 1
  data_data_interactions: true
gate:
  scheme: compensated
  v: auto
  n: 1
  ancilla_omega: 5.0
noise:
  enabled: true
run:
  mode: mc
  shots: 400
  seed: 7
  phases: 12
  bootstrap_resamples: 300
)"},
      {"fig4bc", R"(# Superposition inputs with blast readout at the operating point.
name: fig4bc
system:
  layout: plaquette
  side: 8.84
  data_prep: plus
  loading:
    kind: bernoulli
    probability: 0.5
gate:
  scheme: compensated
  v: auto
  n: 1
  ancilla_omega: 5.0
noise:
  enabled: true
measurement:
  scheme: both
  postselect_data_survival: false
run:
  mode: mc
  shots: 4000
  seed: 11
  phases: 12
  bootstrap_resamples: 300
)"},
      {"figS3", R"(# Geometric phase of a closed detuned trajectory.
name: figS3
)"},
      {"figS4", R"(# Compensated gate robustness against interaction deviations, n = 1, 2, 3.
name: figS4
gate:
  scheme: compensated
  v: 1.1
noise:
  enabled: false
  v_fluctuation_fraction: 0.2
system:
  data_data_interactions: false
run:
  mode: unitary
  phases: 12
)"},
      {"figS5", R"(# Loaded |0> data atoms against unloaded sites.
name: figS5
system:
  layout: plaquette
  side: 8.84
gate:
  scheme: compensated
  v: auto
  n: 1
run:
  mode: unitary
  phases: 12
)"},
  };
  return configs;
}

double circular_mean(const std::vector<double>& phases, const std::vector<double>& weights) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    s += weights[i] * std::sin(phases[i]);
    c += weights[i] * std::cos(phases[i]);
  }
  return std::atan2(s, c);
}

double stderr_of(const dynamics::FringeRow& r) {
  return r.shots > 0 ? noise::binomial_stderr(r.survival_prob, r.shots) : 0.0;
}

Scenario exact_copy(const Scenario& base) {
  Scenario s = base;
  if (s.run.mode == dynamics::Mode::kMonteCarlo) s.run.mode = dynamics::Mode::kUnitary;
  s.system.loading = {};
  return s;
}

// --------------------------------------------------------------------------

ReproResult fig2f(const Scenario& base) {
  ReproResult out{"fig2f", {}, {}, {}};
  const double band = base.noise.v_fluctuation_fraction;
  const double omega = base.gate.omega_data_mhz;
  const double fixed_design = 1.1;
  const std::vector<double> grid = {0.5, 1.0, 1.1, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5};

  auto resonant = [&](double v) {
    return measure_phase_shift(two_atom_scenario(base, v, GateScheme::kResonant)).delta_phi;
  };

  Table t{{"v_mhz", "resonant_dphi_over_pi", "resonant_band_lo_over_pi", "resonant_band_hi_over_pi",
           "compensated_resolved_abs_dphi_over_pi", "compensated_fixed_abs_dphi_over_pi",
           "first_order_over_pi", "first_order_valid"},
          {}};
  std::vector<double> curve;
  for (double v : grid) {
    const double d = resonant(v);
    const double lo = resonant(v * (1.0 - band));
    const double hi = resonant(v * (1.0 + band));
    const double resolved =
        measure_phase_shift(two_atom_scenario(base, v, GateScheme::kCompensated)).delta_phi;
    const double fixed =
        measure_phase_shift(two_atom_scenario(base, v, GateScheme::kCompensated, fixed_design)).delta_phi;
    curve.push_back(d);
    t.add({v, d / kPi, std::min(lo, hi) / kPi, std::max(lo, hi) / kPi, std::abs(resolved) / kPi,
           std::abs(fixed) / kPi, pulse::first_order_phase_error(omega, v) / kPi,
           std::int64_t{pulse::first_order_valid(omega, v)}});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i] > curve[i - 1];
  const double at_working_point = curve[2] / kPi;

  out.tables.emplace_back("dphi_vs_v", std::move(t));
  out.summary = {{"resonant_dphi_over_pi_at_1p1", rounded(at_working_point)},
                 {"resonant_monotone_increasing", monotone},
                 {"resonant_below_pi", curve.back() < kPi},
                 {"omega_data_mhz", rounded(omega)},
                 {"v_band_fraction", rounded(band)},
                 {"fixed_design_v_mhz", fixed_design}};
  std::ostringstream log;
  log << "resonant dphi/pi at V = 1.1 MHz: " << format_number(at_working_point) << "\n";
  log << "monotone over the V grid: " << (monotone ? "yes" : "no") << "\n";
  out.log = log.str();
  return out;
}

// --------------------------------------------------------------------------

struct SectorStats {
  double unweighted = 0.0;
  double weighted = 0.0;
};

SectorStats sector_mean(const std::vector<analysis::FringeFit>& fits) {
  std::vector<double> phases, ones, w;
  for (const auto& f : fits) {
    phases.push_back(f.phase);
    ones.push_back(1.0);
    const double e = f.phase_err.total();
    w.push_back(e > 0.0 ? 1.0 / (e * e) : 1.0);
  }
  return {circular_mean(phases, ones), circular_mean(phases, w)};
}

std::vector<analysis::FringeFit> noiseless_sector_fits(const Scenario& base,
                                                       std::vector<FringeResult>* results = nullptr) {
  std::vector<analysis::FringeFit> fits;
  for (int n = 0; n <= 4; ++n) {
    FringeResult r = run_fringe(plaquette_pattern(base, n), false);
    fits.push_back(r.fit);
    if (results) results->push_back(std::move(r));
  }
  return fits;
}

nlohmann::json operating_point_json(const analysis::OperatingPoint& op) {
  return {{"phase_rad", rounded(op.phase)},
          {"gap", rounded(op.gap)},
          {"mean_gap", rounded(op.mean_gap)},
          {"even_high", op.even_high},
          {"separated", op.separated}};
}

ReproResult fig3bcd(const Scenario& base) {
  ReproResult out{"fig3bcd", {}, {}, {}};
  std::ostringstream log;

  std::vector<FringeResult> ideal;
  const auto ideal_fits = noiseless_sector_fits(base, &ideal);

  std::vector<FringeResult> noisy;
  for (int n = 0; n <= 4; ++n) {
    Scenario s = base;
    s.system.data_loaded.clear();
    s.system.data_level = system::level::kOne;
    s.system.loading = {noise::LoadingSpec::Kind::kFixedCount, 0.5, n};
    s.run.mode = dynamics::Mode::kMonteCarlo;
    noisy.push_back(run_fringe(s, false));
    log << "n = " << n << ": contrast " << format_number(noisy.back().fit.contrast) << ", phase/pi "
        << format_number(noisy.back().fit.phase / kPi) << "\n";
  }

  Table fringes{{"n", "source", "phase_rad", "survival_prob", "err", "shots"}, {}};
  for (int n = 0; n <= 4; ++n) {
    for (const auto& r : ideal[n].rows) {
      fringes.add({std::int64_t{n}, std::string("noiseless"), r.phase_rad, r.survival_prob, 0.0, r.shots});
    }
    for (const auto& r : noisy[n].rows) {
      fringes.add({std::int64_t{n}, std::string("noisy"), r.phase_rad, r.survival_prob, stderr_of(r), r.shots});
    }
  }

  Table phase{{"n", "parity", "noiseless_phase_over_pi", "phase_over_pi", "phase_xi_b_over_pi",
               "phase_xi_f_over_pi", "phase_err_over_pi", "noiseless_contrast", "contrast", "contrast_xi_b",
               "contrast_xi_f", "contrast_err"},
              {}};
  std::vector<analysis::ContrastPoint> points;
  std::vector<analysis::FringeFit> even, odd, even_ideal, odd_ideal;
  for (int n = 0; n <= 4; ++n) {
    const auto& f = noisy[n].fit;
    phase.add({std::int64_t{n}, std::int64_t{analysis::parity(n)}, ideal_fits[n].phase / kPi, f.phase / kPi,
               f.phase_err.bootstrap / kPi, f.phase_err.fit / kPi, f.phase_err.total() / kPi,
               ideal_fits[n].contrast, f.contrast, f.contrast_err.bootstrap, f.contrast_err.fit,
               f.contrast_err.total()});
    points.push_back({n, f.contrast, f.contrast_err.total()});
    (n % 2 == 0 ? even : odd).push_back(f);
    (n % 2 == 0 ? even_ideal : odd_ideal).push_back(ideal_fits[n]);
  }

  const analysis::ContrastDecay decay = analysis::contrast_decay_fit(points);
  Table decay_table{{"n", "contrast", "contrast_err", "model"}, {}};
  for (const auto& p : points) {
    decay_table.add({std::int64_t{p.n}, p.contrast, p.error, decay.c0 * std::pow(decay.fidelity, p.n)});
  }

  const analysis::OperatingPoint op = analysis::operating_point(even, odd);
  const analysis::OperatingPoint op_ideal = analysis::operating_point(even_ideal, odd_ideal);
  const SectorStats se = sector_mean(even), so = sector_mean(odd);

  Table sector{{"phase_rad", "even_mean", "odd_mean"}, {}};
  for (int k = 0; k <= 120; ++k) {
    const double phi = kTwoPi * k / 120.0;
    double e = 0.0, o = 0.0;
    for (const auto& f : even) e += f.evaluate(phi) / static_cast<double>(even.size());
    for (const auto& f : odd) o += f.evaluate(phi) / static_cast<double>(odd.size());
    sector.add({phi, e, o});
  }

  out.tables.emplace_back("fringes", std::move(fringes));
  out.tables.emplace_back("phase_vs_n", std::move(phase));
  out.tables.emplace_back("contrast_decay", std::move(decay_table));
  out.tables.emplace_back("sector_fringes", std::move(sector));

  out.summary = {
      {"fidelity_per_qubit", rounded(decay.fidelity)},
      {"fidelity_per_qubit_err", rounded(decay.fidelity_err)},
      {"c0", rounded(decay.c0)},
      {"c0_err", rounded(decay.c0_err)},
      {"even_mean_phase_over_pi", rounded(se.unweighted / kPi)},
      {"odd_mean_phase_over_pi", rounded(so.unweighted / kPi)},
      {"even_weighted_phase_over_pi", rounded(se.weighted / kPi)},
      {"odd_weighted_phase_over_pi", rounded(so.weighted / kPi)},
      {"sector_separation_over_pi", rounded(wrap_phase(se.unweighted - so.unweighted) / kPi)},
      {"operating_point", operating_point_json(op)},
      {"operating_point_noiseless", operating_point_json(op_ideal)},
  };
  log << "per-qubit fidelity " << format_number(decay.fidelity) << " +- "
      << format_number(decay.fidelity_err) << "\n";
  log << "operating point " << format_number(op.phase) << " rad, gap " << format_number(op.gap) << "\n";
  out.log = log.str();
  return out;
}

// --------------------------------------------------------------------------

struct ParityRun {
  analysis::ParitySummary summary;
  std::int64_t shots = 0;
};

ParityRun parity_run(const Scenario& s, double phase, bool even_high, bool noisy) {
  Scenario run = s;
  run.run.mode = dynamics::Mode::kMonteCarlo;
  run.noise_enabled = noisy;
  const dynamics::Experiment exp = build_experiment(run);
  const dynamics::ScanOptions opts = scan_options(run);
  const auto mc = noise::run_monte_carlo(exp, {phase}, opts.noise, opts.monte_carlo);
  std::vector<analysis::ParityObservation> obs;
  for (const auto& rec : mc.records) {
    const auto& m = rec.measurement;
    if (!m.accepted || !m.ancilla_loaded) continue;
    obs.push_back({m.n_loaded, m.n1, m.ancilla_survived});
  }
  return {analysis::parity_summary(obs, even_high), static_cast<std::int64_t>(mc.records.size())};
}

ReproResult fig4bc(const Scenario& base) {
  ReproResult out{"fig4bc", {}, {}, {}};
  std::ostringstream log;

  Scenario sectors = exact_copy(base);
  sectors.system.data_prep = dynamics::DataPrep::kSiteLevels;
  sectors.measurement = dynamics::MeasurementScheme::kRydbergLoss;
  sectors.postselect_data_survival = true;
  std::vector<analysis::FringeFit> even, odd;
  const auto fits = noiseless_sector_fits(sectors);
  for (int n = 0; n <= 4; ++n) (n % 2 == 0 ? even : odd).push_back(fits[n]);
  const analysis::OperatingPoint op = analysis::operating_point(even, odd);
  log << "operating point " << format_number(op.phase) << " rad (even "
      << (op.even_high ? "high" : "low") << ")\n";

  const ParityRun noisy = parity_run(base, op.phase, op.even_high, true);
  const ParityRun ideal = parity_run(base, op.phase, op.even_high, false);

  // Single-ancilla Ramsey contrast under the same noise, used for correction.
  Scenario ref = base;
  ref.run.mode = dynamics::Mode::kMonteCarlo;
  ref.noise_enabled = base.noise_enabled;
  const FringeResult single = run_fringe(ref, true);
  const double ref_contrast = single.fit.contrast;

  std::vector<double> raw;
  for (const auto& c : noisy.summary.cells) raw.push_back(c.frequency);
  const auto corrected = analysis::correct_contrast(raw, ref_contrast);

  Table grid{{"n_loaded", "n1", "parity", "shots", "survivors", "survival", "err", "corrected",
              "corrected_err", "clipped", "predicted_sign"},
             {}};
  for (std::size_t i = 0; i < noisy.summary.cells.size(); ++i) {
    const auto& c = noisy.summary.cells[i];
    grid.add({std::int64_t{c.n_loaded}, std::int64_t{c.n1}, std::int64_t{analysis::parity(c.n1)}, c.shots,
              c.survivors, c.frequency, c.error, corrected[i].value, c.error / ref_contrast,
              std::int64_t{corrected[i].clipped}, std::int64_t{c.predicted_sign}});
  }
  Table ideal_grid{{"n_loaded", "n1", "shots", "survivors", "survival", "err"}, {}};
  for (const auto& c : ideal.summary.cells) {
    ideal_grid.add({std::int64_t{c.n_loaded}, std::int64_t{c.n1}, c.shots, c.survivors, c.frequency, c.error});
  }
  out.tables.emplace_back("parity_grid", std::move(grid));
  out.tables.emplace_back("parity_grid_noiseless", std::move(ideal_grid));
  out.tables.emplace_back("reference_fringe", fringe_table(single.rows));

  out.summary = {{"operating_point", operating_point_json(op)},
                 {"accuracy", rounded(noisy.summary.accuracy)},
                 {"accuracy_noiseless", rounded(ideal.summary.accuracy)},
                 {"classified_shots", noisy.summary.total},
                 {"reference_contrast", rounded(ref_contrast)}};
  log << "parity accuracy " << format_number(noisy.summary.accuracy) << " (noiseless "
      << format_number(ideal.summary.accuracy) << ")\n";
  log << "single-ancilla contrast " << format_number(ref_contrast) << "\n";
  out.log = log.str();
  return out;
}

// --------------------------------------------------------------------------

ReproResult figS3(const Scenario&) {
  ReproResult out{"figS3", {}, {}, {}};
  Table curve{{"delta_over_omega", "aa_phase_over_pi"}, {}};
  for (int k = -40; k <= 40; ++k) {
    const double x = k / 20.0;
    curve.add({x, pulse::aa_phase(x, 1.0) / kPi});
  }
  const double r3 = 1.0 / std::sqrt(3.0);
  Table markers{{"label", "delta_over_omega", "aa_phase_over_pi"}, {}};
  for (const auto& [label, x] : std::vector<std::pair<std::string, double>>{
           {"resonant", 0.0}, {"data_point", -0.72}, {"compensated_free", r3}, {"compensated_blocked", -r3}}) {
    markers.add({label, x, pulse::aa_phase(x, 1.0) / kPi});
  }
  out.tables.emplace_back("aa_curve", std::move(curve));
  out.tables.emplace_back("markers", std::move(markers));
  out.summary = {{"aa_phase_over_pi_at_resonance", rounded(pulse::aa_phase(0.0, 1.0) / kPi)},
                 {"aa_phase_over_pi_at_minus_0p72", rounded(pulse::aa_phase(-0.72, 1.0) / kPi)},
                 {"compensated_difference_over_pi",
                  rounded((pulse::aa_phase(-r3, 1.0) - pulse::aa_phase(r3, 1.0)) / kPi)}};
  out.log = "aa phase at resonance / pi: " + format_number(pulse::aa_phase(0.0, 1.0) / kPi) + "\n";
  return out;
}

// --------------------------------------------------------------------------

ReproResult figS4(const Scenario& base) {
  ReproResult out{"figS4", {}, {}, {}};
  const double design = base.gate.v_mhz.value_or(1.1);
  const double band = base.noise.v_fluctuation_fraction;
  Table fringes{{"n", "v_scale", "phase_rad", "survival_prob"}, {}};
  Table shifts{{"n", "v_scale", "v_mhz", "dphi_over_pi", "deviation_over_pi"}, {}};
  std::vector<double> spreads;
  std::ostringstream log;
  for (int n = 1; n <= 3; ++n) {
    double lo = 1e9, hi = -1e9;
    for (int k = -4; k <= 4; ++k) {
      const double scale = 1.0 + band * k / 4.0;
      Scenario s = two_atom_scenario(base, design * scale, GateScheme::kCompensated, design);
      s.gate.n = n;
      const PhaseShift ps = measure_phase_shift(s);
      const double dev = wrap_phase(ps.delta_phi - kPi);
      lo = std::min(lo, dev);
      hi = std::max(hi, dev);
      if (k == -4 || k == 0 || k == 4) {
        for (const auto& r : ps.probe.rows) fringes.add({std::int64_t{n}, scale, r.phase_rad, r.survival_prob});
      }
      shifts.add({std::int64_t{n}, scale, design * scale, ps.delta_phi / kPi, dev / kPi});
    }
    spreads.push_back(hi - lo);
    log << "n = " << n << ": spread/pi " << format_number((hi - lo) / kPi) << "\n";
  }
  Table spread{{"n", "spread_over_pi"}, {}};
  for (int n = 1; n <= 3; ++n) spread.add({std::int64_t{n}, spreads[n - 1] / kPi});
  const bool decreasing = spreads[1] < spreads[0] && spreads[2] < spreads[1];
  out.tables.emplace_back("fringes", std::move(fringes));
  out.tables.emplace_back("dphi_vs_scale", std::move(shifts));
  out.tables.emplace_back("spread", std::move(spread));
  out.summary = {{"design_v_mhz", rounded(design)},
                 {"v_band_fraction", rounded(band)},
                 {"spread_over_pi", {rounded(spreads[0] / kPi), rounded(spreads[1] / kPi), rounded(spreads[2] / kPi)}},
                 {"spread_strictly_decreasing", decreasing}};
  out.log = log.str();
  return out;
}

// --------------------------------------------------------------------------

std::vector<double> survival_probs(const dynamics::Experiment& exp, const Scenario& s) {
  std::vector<double> p;
  for (const auto& r : dynamics::ramsey_scan(exp, s.run.phases(), scan_options(s))) {
    p.push_back(r.survival_prob);
  }
  return p;
}

ReproResult figS5(const Scenario& base) {
  ReproResult out{"figS5", {}, {}, {}};
  const Scenario s = exact_copy(base);
  Table eq{{"layout", "pattern", "n_loaded", "max_abs_diff", "phase_over_pi"}, {}};
  Table fringes{{"layout", "pattern", "treatment", "phase_rad", "survival_prob"}, {}};
  double worst = 0.0;
  const std::vector<double> phases = s.run.phases();

  auto compare = [&](const std::string& layout, const dynamics::Experiment& full,
                     const std::vector<bool>& loaded) {
    const system::AtomSystem& sys = full.system;
    std::vector<int> levels(sys.num_sites(), system::level::kGround);
    std::vector<bool> all(sys.num_sites(), true);
    std::string pattern;
    int n = 0;
    const auto data = sys.data_sites();
    for (std::size_t i = 0; i < data.size(); ++i) {
      levels[data[i]] = loaded[i] ? system::level::kOne : system::level::kZero;
      pattern += loaded[i] ? '1' : '0';
      n += loaded[i];
    }
    std::vector<bool> flags = all;
    for (std::size_t i = 0; i < data.size(); ++i) flags[data[i]] = loaded[i];

    dynamics::Experiment unloaded = full;
    unloaded.system = sys.with_initial_levels(levels).with_loading(flags);
    dynamics::Experiment zeros = full;
    zeros.system = sys.with_initial_levels(levels).with_loading(all);

    const auto pu = survival_probs(unloaded, s);
    const auto pz = survival_probs(zeros, s);
    double diff = 0.0;
    for (std::size_t k = 0; k < pu.size(); ++k) {
      diff = std::max(diff, std::abs(pu[k] - pz[k]));
      fringes.add({layout, pattern, std::string("unloaded"), phases[k], pu[k]});
      fringes.add({layout, pattern, std::string("loaded_zero"), phases[k], pz[k]});
    }
    std::vector<analysis::FringeSample> samples;
    for (std::size_t k = 0; k < pu.size(); ++k) samples.push_back(analysis::FringeSample::exact(phases[k], pu[k]));
    const auto fit = analysis::fit_fringe(samples);
    worst = std::max(worst, diff);
    eq.add({layout, pattern, std::int64_t{n}, diff, fit.phase / kPi});
  };

  Scenario plaq = s;
  plaq.system.layout = Layout::kPlaquette;
  plaq.system.data_loaded.clear();
  const dynamics::Experiment full_plaq = build_experiment(plaq);
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<bool> loaded(4);
    for (int i = 0; i < 4; ++i) loaded[i] = (mask >> (3 - i)) & 1;
    compare("plaquette", full_plaq, loaded);
  }
  for (const GateScheme scheme : {GateScheme::kResonant, GateScheme::kCompensated}) {
    Scenario two = two_atom_scenario(s, 1.1, scheme);
    const dynamics::Experiment full_two = build_experiment(two);
    const std::string layout = std::string("two_atom_") + pulse::to_string(scheme);
    compare(layout, full_two, {false});
    compare(layout, full_two, {true});
  }
  out.tables.emplace_back("equivalence", std::move(eq));
  out.tables.emplace_back("fringes", std::move(fringes));
  out.summary = {{"max_abs_diff", worst}, {"equivalent_within_1e-9", worst < 1e-9}};
  out.log = "largest unloaded vs loaded-|0> difference: " + format_number(worst) + "\n";
  return out;
}

}  // namespace

const Table& ReproResult::table(const std::string& name) const {
  for (const auto& [n, t] : tables) {
    if (n == name) return t;
  }
  throw InvalidArgument("repro " + id + ": no table '" + name + "'");
}

const std::vector<std::string>& repro_ids() {
  static const std::vector<std::string> ids = {"fig2f", "fig3bcd", "fig4bc", "figS3", "figS4", "figS5"};
  return ids;
}

const std::string& default_repro_config(const std::string& id) {
  const auto& configs = default_configs();
  const auto it = configs.find(id);
  if (it == configs.end()) {
    std::string list;
    for (const auto& i : repro_ids()) list += (list.empty() ? "" : ", ") + i;
    throw ConfigError("unknown repro id '" + id + "'; valid ids: " + list);
  }
  return it->second;
}

ReproResult run_repro(const std::string& id, const Scenario& base) {
  (void)default_repro_config(id);
  if (id == "fig2f") return fig2f(base);
  if (id == "fig3bcd") return fig3bcd(base);
  if (id == "fig4bc") return fig4bc(base);
  if (id == "figS3") return figS3(base);
  if (id == "figS4") return figS4(base);
  return figS5(base);
}

void write_repro(const ReproResult& result, const Scenario& base, const std::filesystem::path& dir,
                 OutputFormat format) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, table] : result.tables) write_table(dir, name, table, format);
  const std::string config = to_yaml_text(base);
  nlohmann::json summary = result.summary;
  summary["id"] = result.id;
  summary["versions"] = version_info();
  summary["config_sha256"] = sha256_hex(config);
  summary["seed"] = base.run.seed;
  summary["config"] = config;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "run.log", result.log);
}

PhaseShift measure_phase_shift(const Scenario& scenario) {
  FringeResult probe = run_fringe(scenario, false);
  FringeResult ref = run_fringe(scenario, true);
  if (!probe.fit.phase_defined || !ref.fit.phase_defined) {
    throw NumericalError("phase shift undefined: a fringe has zero contrast");
  }
  const double d = analysis::delta_phi(ref.fit, probe.fit);
  return {d, std::move(probe), std::move(ref)};
}

Scenario two_atom_scenario(const Scenario& base, double v_mhz, GateScheme scheme,
                           std::optional<double> design_v_mhz) {
  Scenario s = base;
  s.system.layout = Layout::kTwoAtom;
  s.system.v_mhz = v_mhz;
  s.system.data_loaded.clear();
  s.system.sites.clear();
  s.system.overrides.clear();
  s.system.data_level = system::level::kOne;
  s.system.data_prep = dynamics::DataPrep::kSiteLevels;
  s.system.loading = {};
  s.gate.scheme = scheme;
  s.gate.v_mhz = design_v_mhz.value_or(v_mhz);
  s.measurement = dynamics::MeasurementScheme::kRydbergLoss;
  s.postselect_data_survival = true;
  return s;
}

Scenario plaquette_pattern(const Scenario& base, int n) {
  if (n < 0 || n > 4) throw InvalidArgument("plaquette_pattern: n must be in [0, 4]");
  Scenario s = exact_copy(base);
  s.system.layout = Layout::kPlaquette;
  s.system.sites.clear();
  s.system.data_loaded = {n > 0, n > 1, n > 2, n > 3};
  s.system.data_level = system::level::kOne;
  s.noise_enabled = false;
  s.run.mode = dynamics::Mode::kUnitary;
  return s;
}

}  // namespace rydstab::cli
