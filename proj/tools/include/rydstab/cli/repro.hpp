#pragma once

// Named figure-data experiments. Each id runs a pinned scenario set built
// from a base config and emits tables plus a JSON summary.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydstab/analysis.hpp"
#include "rydstab/cli/run.hpp"
#include "rydstab/cli/scenario.hpp"
#include "rydstab/cli/table.hpp"

namespace rydstab::cli {

struct ReproResult {
  std::string id;
  std::vector<std::pair<std::string, Table>> tables;
  nlohmann::json summary;
  std::string log;

  const Table& table(const std::string& name) const;
};

const std::vector<std::string>& repro_ids();

// Canonical base config of an id (the same text ships as configs/<id>.yaml).
// Throws ConfigError listing the valid ids for an unknown id.
const std::string& default_repro_config(const std::string& id);

ReproResult run_repro(const std::string& id, const Scenario& base);

// <dir>/<table>.<csv|json>, summary.json and run.log.
void write_repro(const ReproResult& result, const Scenario& base, const std::filesystem::path& dir,
                 OutputFormat format);

// Building blocks shared with the tests.

struct PhaseShift {
  double delta_phi = 0.0;  // probe minus reference, (-pi, pi]
  FringeResult probe;
  FringeResult reference;
};

// Probe (data loaded) and reference (data unloaded) fringes of `scenario`.
PhaseShift measure_phase_shift(const Scenario& scenario);

// Two-atom variant of `base` at interaction v. design_v empty re-solves the
// compensated gate at v.
Scenario two_atom_scenario(const Scenario& base, double v_mhz, pulse::GateScheme scheme,
                           std::optional<double> design_v_mhz = std::nullopt);

// Plaquette variant of `base` with the first n data sites (row-major) loaded
// in |1>, noiseless, exact mode.
Scenario plaquette_pattern(const Scenario& base, int n);

}  // namespace rydstab::cli
