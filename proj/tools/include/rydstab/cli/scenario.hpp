#pragma once

// Typed scenario config. Every field has a default, so an empty section is a
// valid noiseless two-atom run.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "rydstab/dynamics.hpp"
#include "rydstab/noise.hpp"
#include "rydstab/pulse.hpp"
#include "rydstab/ramsey.hpp"
#include "rydstab/system.hpp"

namespace rydstab::cli {

enum class Layout { kTwoAtom, kPlaquette, kExplicit };
enum class OutputFormat { kCsv, kJson };

struct SystemConfig {
  Layout layout = Layout::kTwoAtom;
  double v_mhz = 1.1;
  double side_um = 8.84;
  std::vector<bool> data_loaded;  // empty: every data site loaded
  int data_level = system::level::kOne;
  dynamics::DataPrep data_prep = dynamics::DataPrep::kSiteLevels;
  bool data_data_interactions = true;
  double c6_inter = system::kC6InterNaCs;
  double c6_intra_data = system::kC6IntraCs;
  std::optional<double> c6_intra_ancilla;
  std::vector<system::AtomSite> sites;
  std::vector<system::InteractionOverride> overrides;
  noise::LoadingSpec loading;
};

struct GateConfig {
  pulse::GateScheme scheme = pulse::GateScheme::kCompensated;
  std::optional<double> v_mhz;  // nullopt: auto
  int n = 1;
  double omega_data_mhz = 0.918;
  double ancilla_omega_mhz = 5.0;
  bool instantaneous_ancilla = false;
};

struct RunConfig {
  dynamics::Mode mode = dynamics::Mode::kUnitary;
  std::int64_t shots = 1000;
  std::uint64_t seed = 1;
  int phase_count = 12;
  std::vector<double> phase_list;  // overrides phase_count when non-empty
  double trajectory_dt_us = 0.005;
  bool reference = true;
  int bootstrap_resamples = 300;

  std::vector<double> phases() const;
};

struct Scenario {
  std::string name = "scenario";
  SystemConfig system;
  GateConfig gate;
  bool noise_enabled = false;
  noise::NoiseModel noise;  // configured model, used only when noise_enabled
  dynamics::MeasurementScheme measurement = dynamics::MeasurementScheme::kRydbergLoss;
  bool postselect_data_survival = true;
  RunConfig run;
  std::string output_dir;  // empty: $RYDSTAB_OUT_DIR or "rydstab_out"
  OutputFormat format = OutputFormat::kCsv;

  // Noise model actually used (none() unless enabled).
  noise::NoiseModel effective_noise() const;
};

// Validates against the schema first; throws ConfigError.
Scenario parse_scenario(const YAML::Node& root);
Scenario parse_scenario_text(const std::string& yaml);
Scenario load_scenario(const std::string& path);

// Every field, written back in schema order. Parsing the result gives the
// same Scenario.
YAML::Node to_yaml(const Scenario& scenario);
std::string to_yaml_text(const Scenario& scenario);

// reference = true unloads every data site.
system::AtomSystem build_system(const Scenario& scenario, bool reference = false);

// gate.v, or with auto the largest ancilla-data interaction of the full
// geometry (every site treated as loaded).
double design_v(const Scenario& scenario);

dynamics::Experiment build_experiment(const Scenario& scenario, bool reference = false);
dynamics::ScanOptions scan_options(const Scenario& scenario, bool reference = false);

std::string default_output_dir();

const char* to_string(Layout layout);
const char* to_string(OutputFormat format);

}  // namespace rydstab::cli
