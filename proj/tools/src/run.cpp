#include "rydstab/cli/run.hpp"

#include <Eigen/Core>
#include <openssl/opensslv.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydstab/error.hpp"
#include "rydstab/ramsey.hpp"
#include "rydstab/units.hpp"

#ifndef RYDSTAB_VERSION
#define RYDSTAB_VERSION "0.0.0"
#endif

namespace rydstab::cli {

std::vector<analysis::FringeSample> fringe_samples(const std::vector<dynamics::FringeRow>& rows) {
  const bool counted = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.shots > 0; });
  std::vector<analysis::FringeSample> out;
  for (const auto& r : rows) {
    if (!counted) {
      out.push_back(analysis::FringeSample::exact(r.phase_rad, r.survival_prob));
    } else if (r.shots > 0) {
      out.push_back(analysis::FringeSample::counts(r.phase_rad, r.successes, r.shots));
    }
  }
  return out;
}

analysis::FringeFit fit_rows(const std::vector<dynamics::FringeRow>& rows, int bootstrap_resamples,
                             std::uint64_t seed) {
  const auto samples = fringe_samples(rows);
  const bool counted = !samples.empty() && samples.front().shots > 0;
  if (counted && bootstrap_resamples >= 2) {
    analysis::BootstrapOptions opts;
    opts.resamples = bootstrap_resamples;
    opts.seed = seed;
    return analysis::bootstrap(samples, opts).fit;
  }
  return analysis::fit_fringe(samples);
}

FringeResult run_fringe(const Scenario& s, bool reference) {
  const dynamics::Experiment exp = build_experiment(s, reference);
  const dynamics::ScanOptions opts = scan_options(s, reference);
  const std::vector<double> phases = s.run.phases();
  FringeResult out{{}, {}, {}, exp.system};
  if (opts.mode == dynamics::Mode::kMonteCarlo) {
    noise::MonteCarloResult mc = noise::run_monte_carlo(exp, phases, opts.noise, opts.monte_carlo);
    out.rows = std::move(mc.summary);
    out.records = std::move(mc.records);
    out.fit = fit_rows(out.rows, s.run.bootstrap_resamples, s.run.seed);
  } else {
    out.rows = dynamics::ramsey_scan(exp, phases, opts);
    out.fit = fit_rows(out.rows, 0, s.run.seed);
  }
  return out;
}

namespace {

bool has_data_sites(const Scenario& s) {
  if (s.system.layout != Layout::kExplicit) return true;
  for (const auto& site : s.system.sites) {
    if (site.role == system::Role::kData) return true;
  }
  return false;
}

}  // namespace

RunOutcome run_scenario(const Scenario& s) {
  RunOutcome out{to_yaml_text(s), {}, run_fringe(s, false), std::nullopt, std::nullopt, 0.0, {}, {}};
  out.config_hash = sha256_hex(out.config_text);
  std::ostringstream log;
  log << "scenario " << s.name << "\n";
  log << "config_sha256 " << out.config_hash << "\n";
  log << "mode " << dynamics::to_string(s.run.mode) << ", seed " << s.run.seed << ", phases "
      << s.run.phases().size() << "\n";
  log << "hilbert dimension " << out.probe.system.space().total_dim() << "\n";

  const dynamics::Experiment probe_exp = build_experiment(s);
  const pulse::PulseSequence seq0 = probe_exp.sequence_for_phase(0.0);
  log << "readout sequence at phase 0:\n" << pulse::to_text(seq0);

  if (s.run.reference && has_data_sites(s)) {
    out.reference = run_fringe(s, true);
    if (out.reference->fit.phase_defined && out.probe.fit.phase_defined) {
      out.delta_phi = analysis::delta_phi(out.reference->fit, out.probe.fit);
      out.delta_phi_err = std::hypot(out.probe.fit.phase_err.total(), out.reference->fit.phase_err.total());
    }
  }

  nlohmann::json& r = out.report;
  r["tool"] = "rydstab";
  r["versions"] = version_info();
  r["scenario"] = s.name;
  r["config_sha256"] = out.config_hash;
  r["seed"] = s.run.seed;
  r["mode"] = dynamics::to_string(s.run.mode);
  if (s.run.mode == dynamics::Mode::kMonteCarlo) r["shots_per_phase"] = s.run.shots;
  r["config"] = out.config_text;
  if (seq0.design_v_mhz()) r["design_v_mhz"] = rounded(*seq0.design_v_mhz());
  r["sequence_duration_us"] = rounded(seq0.total_duration_us());
  r["probe"] = fit_json(out.probe.fit);
  log << "probe contrast " << format_number(out.probe.fit.contrast) << " phase/pi "
      << format_number(out.probe.fit.phase / kPi) << "\n";
  if (out.reference) {
    r["reference"] = fit_json(out.reference->fit);
    log << "reference contrast " << format_number(out.reference->fit.contrast) << " phase/pi "
        << format_number(out.reference->fit.phase / kPi) << "\n";
  }
  if (out.delta_phi) {
    r["delta_phi"] = {{"value_rad", rounded(*out.delta_phi)},
                      {"value_over_pi", rounded(*out.delta_phi / kPi)},
                      {"xi_total", rounded(out.delta_phi_err)}};
    log << "delta_phi/pi " << format_number(*out.delta_phi / kPi) << " +- "
        << format_number(out.delta_phi_err / kPi) << "\n";
  } else if (out.reference) {
    log << "delta_phi undefined (a fringe has zero contrast)\n";
  }
  out.log = log.str();
  return out;
}

Table fringe_table(const std::vector<dynamics::FringeRow>& rows) {
  Table t{{"phase_rad", "survival_prob", "shots", "successes", "ideal_survival_prob"}, {}};
  for (const auto& r : rows) {
    t.add({r.phase_rad, r.survival_prob, r.shots, r.successes, r.ideal_survival_prob});
  }
  return t;
}

Table records_table(const std::vector<noise::ShotRecord>& records) {
  Table t{{"phase_index", "phase_rad", "shot", "n_loaded", "prepared_n1", "n1", "ancilla_survived",
           "accepted"},
          {}};
  const std::size_t sites = records.empty() ? 0 : records.front().measurement.loaded.size();
  for (std::size_t i = 0; i < sites; ++i) {
    t.columns.push_back("loaded_" + std::to_string(i));
    t.columns.push_back("survived_" + std::to_string(i));
  }
  for (const auto& rec : records) {
    const auto& m = rec.measurement;
    std::vector<Cell> row{std::int64_t{rec.phase_index}, rec.phase_rad, rec.shot,
                          std::int64_t{m.n_loaded}, std::int64_t{rec.prepared_n1}, std::int64_t{m.n1},
                          std::int64_t{m.ancilla_survived}, std::int64_t{m.accepted}};
    for (std::size_t i = 0; i < sites; ++i) {
      row.emplace_back(std::int64_t{m.loaded[i]});
      row.emplace_back(std::int64_t{m.survived[i]});
    }
    t.add(std::move(row));
  }
  return t;
}

void write_outputs(const RunOutcome& o, const std::filesystem::path& dir, OutputFormat format) {
  std::filesystem::create_directories(dir);
  write_table(dir, "fringe", fringe_table(o.probe.rows), format);
  if (o.reference) write_table(dir, "fringe_reference", fringe_table(o.reference->rows), format);
  if (!o.probe.records.empty()) write_table(dir, "records", records_table(o.probe.records), format);
  write_text(dir / "report.json", o.report.dump(2) + "\n");
  write_text(dir / "run.log", o.log);
}

namespace {

void flatten(const nlohmann::json& j, const std::string& prefix, std::map<std::string, double>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_number()) {
    out[prefix] = j.get<double>();
  }
}

}  // namespace

std::map<std::string, double> report_scalars(const nlohmann::json& report) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : report.items()) {
    if (k == "versions") continue;
    flatten(v, k, out);
  }
  return out;
}

nlohmann::json version_info() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
  std::ostringstream json;
  json << NLOHMANN_JSON_VERSION_MAJOR << "." << NLOHMANN_JSON_VERSION_MINOR << "."
       << NLOHMANN_JSON_VERSION_PATCH;
  return {{"rydstab", RYDSTAB_VERSION},
          {"eigen", eigen.str()},
          {"nlohmann_json", json.str()},
          {"openssl", OPENSSL_VERSION_TEXT}};
}

}  // namespace rydstab::cli
