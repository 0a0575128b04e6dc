#pragma once

// Scenario execution: fringe scans, fits, reference run, report assembly.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydstab/analysis.hpp"
#include "rydstab/cli/scenario.hpp"
#include "rydstab/cli/table.hpp"
#include "rydstab/noise.hpp"

namespace rydstab::cli {

struct FringeResult {
  std::vector<dynamics::FringeRow> rows;
  analysis::FringeFit fit;
  std::vector<noise::ShotRecord> records;  // Monte Carlo only
  system::AtomSystem system;
};

struct RunOutcome {
  std::string config_text;  // effective config, canonical YAML
  std::string config_hash;  // sha256 of config_text
  FringeResult probe;
  std::optional<FringeResult> reference;
  std::optional<double> delta_phi;
  double delta_phi_err = 0.0;
  nlohmann::json report;
  std::string log;
};

// Samples for fit_fringe: counts for shot rows, exact otherwise. Bins
// without accepted shots are dropped.
std::vector<analysis::FringeSample> fringe_samples(const std::vector<dynamics::FringeRow>& rows);

// Fit, bootstrapped when the rows carry counts and resamples >= 2.
analysis::FringeFit fit_rows(const std::vector<dynamics::FringeRow>& rows, int bootstrap_resamples,
                             std::uint64_t seed);

FringeResult run_fringe(const Scenario& scenario, bool reference);
RunOutcome run_scenario(const Scenario& scenario);

Table fringe_table(const std::vector<dynamics::FringeRow>& rows);
Table records_table(const std::vector<noise::ShotRecord>& records);

// fringe, fringe_reference, records (mc), report.json and run.log under dir.
void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir,
                   OutputFormat format);

// Numeric leaves of a report as dotted keys ("probe.contrast.value", ...).
std::map<std::string, double> report_scalars(const nlohmann::json& report);

// Versions of the tool and its numeric dependencies.
nlohmann::json version_info();

}  // namespace rydstab::cli
