#include "rydstab/cli/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rydstab/cli/schema.hpp"
#include "rydstab/error.hpp"

namespace rydstab::cli {
namespace {

using dynamics::DataPrep;
using dynamics::MeasurementScheme;
using dynamics::Mode;
using noise::LoadingSpec;
using pulse::GateScheme;
using system::AtomSite;
using system::Role;

template <typename T>
void read(const YAML::Node& parent, const char* key, T& out) {
  if (const YAML::Node n = parent[key]) out = n.as<T>();
}

template <typename E>
E parse_enum(const YAML::Node& parent, const char* key, E fallback,
             std::initializer_list<std::pair<const char*, E>> table) {
  const YAML::Node n = parent[key];
  if (!n) return fallback;
  const std::string s = n.as<std::string>();
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  return fallback;  // unreachable after schema validation
}

void read_species(const YAML::Node& n, noise::SpeciesNoise& s) {
  if (!n) return;
  read(n, "t2_star", s.t2_star_us);
  read(n, "rabi_tau", s.rabi_tau_us);
  read(n, "scattering_loss", s.scattering_loss);
  read(n, "imaging_loss", s.imaging_loss);
  read(n, "calibration_omega", s.calibration_omega_mhz);
}

YAML::Node species_yaml(const noise::SpeciesNoise& s) {
  YAML::Node n;
  n["t2_star"] = s.t2_star_us;
  n["rabi_tau"] = s.rabi_tau_us;
  n["scattering_loss"] = s.scattering_loss;
  n["imaging_loss"] = s.imaging_loss;
  n["calibration_omega"] = s.calibration_omega_mhz;
  return n;
}

const char* loading_name(LoadingSpec::Kind k) {
  switch (k) {
    case LoadingSpec::Kind::kBernoulli: return "bernoulli";
    case LoadingSpec::Kind::kFixedCount: return "fixed_count";
    case LoadingSpec::Kind::kAsConfigured: break;
  }
  return "as_configured";
}

int expected_data_sites(const Scenario& s) {
  switch (s.system.layout) {
    case Layout::kTwoAtom: return 1;
    case Layout::kPlaquette: return 4;
    case Layout::kExplicit: break;
  }
  int n = 0;
  for (const AtomSite& site : s.system.sites) n += site.role == Role::kData;
  return n;
}

void check_consistency(const Scenario& s) {
  const SystemConfig& sys = s.system;
  if (sys.layout == Layout::kExplicit) {
    if (sys.sites.empty()) throw ConfigError("system.sites: explicit layout needs at least one site");
    int ancillas = 0;
    for (const AtomSite& site : sys.sites) ancillas += site.role == Role::kAncilla;
    if (ancillas > 1) throw ConfigError("system.sites: at most one ancilla is supported");
    if (!sys.data_loaded.empty()) {
      throw ConfigError("system.data_loaded: explicit layouts set `loaded` per site");
    }
  } else if (!sys.sites.empty()) {
    throw ConfigError("system.sites: only valid with layout: explicit");
  }
  const int n_data = expected_data_sites(s);
  if (!sys.data_loaded.empty() && static_cast<int>(sys.data_loaded.size()) != n_data) {
    throw ConfigError("system.data_loaded: expected " + std::to_string(n_data) + " flags, got " +
                      std::to_string(sys.data_loaded.size()));
  }
  const int n_sites = sys.layout == Layout::kExplicit ? static_cast<int>(sys.sites.size())
                                                      : 1 + n_data;
  for (std::size_t i = 0; i < sys.overrides.size(); ++i) {
    const auto& o = sys.overrides[i];
    if (o.site_a >= n_sites || o.site_b >= n_sites || o.site_a == o.site_b) {
      throw ConfigError("system.overrides[" + std::to_string(i) + "]: site indices must be distinct and < " +
                        std::to_string(n_sites));
    }
  }
  if (sys.loading.kind == LoadingSpec::Kind::kFixedCount && sys.loading.count > n_data) {
    throw ConfigError("system.loading.count: exceeds the " + std::to_string(n_data) + " data sites");
  }
  if (sys.loading.kind != LoadingSpec::Kind::kAsConfigured && s.run.mode != Mode::kMonteCarlo) {
    throw ConfigError("system.loading.kind: stochastic loading needs run.mode: mc");
  }
  if (s.run.phase_list.empty() && s.run.phase_count < 4) {
    throw ConfigError("run.phases: need at least 4 phases");
  }
  try {
    s.noise.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::vector<double> RunConfig::phases() const {
  return phase_list.empty() ? dynamics::phase_grid(phase_count) : phase_list;
}

noise::NoiseModel Scenario::effective_noise() const {
  return noise_enabled ? noise : noise::NoiseModel::none();
}

Scenario parse_scenario(const YAML::Node& root) {
  validate(root);
  Scenario s;
  read(root, "name", s.name);

  if (const YAML::Node n = root["system"]) {
    SystemConfig& sys = s.system;
    sys.layout = parse_enum(n, "layout", sys.layout,
                            {{"two_atom", Layout::kTwoAtom},
                             {"plaquette", Layout::kPlaquette},
                             {"explicit", Layout::kExplicit}});
    read(n, "v", sys.v_mhz);
    read(n, "side", sys.side_um);
    if (const YAML::Node l = n["data_loaded"]) {
      for (const auto& f : l) sys.data_loaded.push_back(f.as<bool>());
    }
    read(n, "data_level", sys.data_level);
    sys.data_prep = parse_enum(n, "data_prep", sys.data_prep,
                               {{"site_levels", DataPrep::kSiteLevels}, {"plus", DataPrep::kPlus}});
    read(n, "data_data_interactions", sys.data_data_interactions);
    read(n, "c6_inter", sys.c6_inter);
    read(n, "c6_intra_data", sys.c6_intra_data);
    if (const YAML::Node c = n["c6_intra_ancilla"]) sys.c6_intra_ancilla = c.as<double>();
    if (const YAML::Node list = n["sites"]) {
      for (const auto& item : list) {
        AtomSite site;
        site.role = parse_enum(item, "role", Role::kData,
                               {{"ancilla", Role::kAncilla}, {"data", Role::kData}});
        read(item, "x", site.position.x_um);
        read(item, "y", site.position.y_um);
        read(item, "loaded", site.loaded);
        site.initial_level = site.role == Role::kAncilla ? system::level::kGround : system::level::kOne;
        read(item, "level", site.initial_level);
        read(item, "detuning_offset", site.detuning_offset_mhz);
        read(item, "omega_scale", site.omega_scale);
        sys.sites.push_back(site);
      }
    }
    if (const YAML::Node list = n["overrides"]) {
      for (const auto& item : list) {
        system::InteractionOverride o;
        read(item, "a", o.site_a);
        read(item, "b", o.site_b);
        read(item, "v", o.v_mhz);
        sys.overrides.push_back(o);
      }
    }
    if (const YAML::Node l = n["loading"]) {
      sys.loading.kind = parse_enum(l, "kind", sys.loading.kind,
                                    {{"as_configured", LoadingSpec::Kind::kAsConfigured},
                                     {"bernoulli", LoadingSpec::Kind::kBernoulli},
                                     {"fixed_count", LoadingSpec::Kind::kFixedCount}});
      read(l, "probability", sys.loading.probability);
      read(l, "count", sys.loading.count);
    }
  }

  if (const YAML::Node n = root["gate"]) {
    GateConfig& g = s.gate;
    g.scheme = parse_enum(n, "scheme", g.scheme,
                          {{"resonant", GateScheme::kResonant}, {"compensated", GateScheme::kCompensated}});
    if (const YAML::Node v = n["v"]) {
      if (v.as<std::string>() == "auto") {
        g.v_mhz.reset();
      } else {
        g.v_mhz = v.as<double>();
      }
    }
    read(n, "n", g.n);
    read(n, "omega_data", g.omega_data_mhz);
    read(n, "ancilla_omega", g.ancilla_omega_mhz);
    read(n, "instantaneous_ancilla", g.instantaneous_ancilla);
  }

  if (const YAML::Node n = root["noise"]) {
    s.noise_enabled = true;
    read(n, "enabled", s.noise_enabled);
    noise::NoiseModel& m = s.noise;
    read_species(n["ancilla"], m.ancilla);
    read_species(n["data"], m.data);
    read(n, "gate_infidelity_data_2pi", m.gate_infidelity_data_2pi);
    m.data_damping = parse_enum(n, "data_damping", m.data_damping,
                                {{"lindblad", noise::DataDamping::kLindblad},
                                 {"classical_loss", noise::DataDamping::kClassicalLoss}});
    read(n, "v_fluctuation_fraction", m.v_fluctuation_fraction);
    m.v_distribution = parse_enum(n, "v_distribution", m.v_distribution,
                                  {{"uniform", noise::VDistribution::kUniform},
                                   {"gaussian", noise::VDistribution::kGaussian}});
    read(n, "spam", m.spam);
    read(n, "blast_infidelity", m.blast_infidelity);
    read(n, "omega_gradient_per_um", m.omega_gradient_per_um);
  }

  if (const YAML::Node n = root["measurement"]) {
    s.measurement = parse_enum(n, "scheme", s.measurement,
                               {{"rydberg_loss", MeasurementScheme::kRydbergLoss},
                                {"blast_1", MeasurementScheme::kBlastOne},
                                {"both", MeasurementScheme::kBoth}});
    read(n, "postselect_data_survival", s.postselect_data_survival);
  }

  if (const YAML::Node n = root["run"]) {
    RunConfig& r = s.run;
    r.mode = parse_enum(n, "mode", r.mode,
                        {{"unitary", Mode::kUnitary}, {"lindblad", Mode::kLindblad}, {"mc", Mode::kMonteCarlo}});
    read(n, "shots", r.shots);
    read(n, "seed", r.seed);
    if (const YAML::Node p = n["phases"]) {
      if (p.IsSequence()) {
        for (const auto& v : p) r.phase_list.push_back(v.as<double>());
      } else {
        r.phase_count = p.as<int>();
      }
    }
    read(n, "trajectory_dt", r.trajectory_dt_us);
    read(n, "reference", r.reference);
    read(n, "bootstrap_resamples", r.bootstrap_resamples);
  }

  if (const YAML::Node n = root["output"]) {
    read(n, "dir", s.output_dir);
    s.format = parse_enum(n, "format", s.format, {{"csv", OutputFormat::kCsv}, {"json", OutputFormat::kJson}});
  }

  check_consistency(s);
  return s;
}

Scenario parse_scenario_text(const std::string& yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("YAML syntax error: ") + e.what());
  }
  return parse_scenario(root);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_scenario_text(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

YAML::Node to_yaml(const Scenario& s) {
  YAML::Node root;
  root["name"] = s.name;

  YAML::Node sys;
  const SystemConfig& c = s.system;
  sys["layout"] = to_string(c.layout);
  sys["v"] = c.v_mhz;
  sys["side"] = c.side_um;
  if (!c.data_loaded.empty()) {
    YAML::Node flags;
    for (bool f : c.data_loaded) flags.push_back(f);
    flags.SetStyle(YAML::EmitterStyle::Flow);
    sys["data_loaded"] = flags;
  }
  sys["data_level"] = c.data_level;
  sys["data_prep"] = c.data_prep == DataPrep::kPlus ? "plus" : "site_levels";
  sys["data_data_interactions"] = c.data_data_interactions;
  sys["c6_inter"] = c.c6_inter;
  sys["c6_intra_data"] = c.c6_intra_data;
  if (c.c6_intra_ancilla) sys["c6_intra_ancilla"] = *c.c6_intra_ancilla;
  if (!c.sites.empty()) {
    YAML::Node list;
    for (const AtomSite& site : c.sites) {
      YAML::Node item;
      item["role"] = site.role == Role::kAncilla ? "ancilla" : "data";
      item["x"] = site.position.x_um;
      item["y"] = site.position.y_um;
      item["loaded"] = site.loaded;
      item["level"] = site.initial_level;
      item["detuning_offset"] = site.detuning_offset_mhz;
      item["omega_scale"] = site.omega_scale;
      list.push_back(item);
    }
    sys["sites"] = list;
  }
  if (!c.overrides.empty()) {
    YAML::Node list;
    for (const auto& o : c.overrides) {
      YAML::Node item;
      item["a"] = o.site_a;
      item["b"] = o.site_b;
      item["v"] = o.v_mhz;
      list.push_back(item);
    }
    sys["overrides"] = list;
  }
  YAML::Node loading;
  loading["kind"] = loading_name(c.loading.kind);
  loading["probability"] = c.loading.probability;
  loading["count"] = c.loading.count;
  sys["loading"] = loading;
  root["system"] = sys;

  YAML::Node gate;
  gate["scheme"] = to_string(s.gate.scheme);
  if (s.gate.v_mhz) {
    gate["v"] = *s.gate.v_mhz;
  } else {
    gate["v"] = "auto";
  }
  gate["n"] = s.gate.n;
  gate["omega_data"] = s.gate.omega_data_mhz;
  gate["ancilla_omega"] = s.gate.ancilla_omega_mhz;
  gate["instantaneous_ancilla"] = s.gate.instantaneous_ancilla;
  root["gate"] = gate;

  YAML::Node nz;
  const noise::NoiseModel& m = s.noise;
  nz["enabled"] = s.noise_enabled;
  nz["ancilla"] = species_yaml(m.ancilla);
  nz["data"] = species_yaml(m.data);
  nz["gate_infidelity_data_2pi"] = m.gate_infidelity_data_2pi;
  nz["data_damping"] = m.data_damping == noise::DataDamping::kLindblad ? "lindblad" : "classical_loss";
  nz["v_fluctuation_fraction"] = m.v_fluctuation_fraction;
  nz["v_distribution"] = m.v_distribution == noise::VDistribution::kUniform ? "uniform" : "gaussian";
  nz["spam"] = m.spam;
  nz["blast_infidelity"] = m.blast_infidelity;
  nz["omega_gradient_per_um"] = m.omega_gradient_per_um;
  root["noise"] = nz;

  YAML::Node meas;
  meas["scheme"] = dynamics::to_string(s.measurement);
  meas["postselect_data_survival"] = s.postselect_data_survival;
  root["measurement"] = meas;

  YAML::Node run;
  run["mode"] = dynamics::to_string(s.run.mode);
  run["shots"] = s.run.shots;
  run["seed"] = s.run.seed;
  if (s.run.phase_list.empty()) {
    run["phases"] = s.run.phase_count;
  } else {
    YAML::Node list;
    for (double p : s.run.phase_list) list.push_back(p);
    list.SetStyle(YAML::EmitterStyle::Flow);
    run["phases"] = list;
  }
  run["trajectory_dt"] = s.run.trajectory_dt_us;
  run["reference"] = s.run.reference;
  run["bootstrap_resamples"] = s.run.bootstrap_resamples;
  root["run"] = run;

  YAML::Node out;
  if (!s.output_dir.empty()) out["dir"] = s.output_dir;
  out["format"] = to_string(s.format);
  root["output"] = out;
  return root;
}

std::string to_yaml_text(const Scenario& s) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << to_yaml(s);
  return std::string(e.c_str()) + "\n";
}

system::AtomSystem build_system(const Scenario& s, bool reference) {
  const SystemConfig& c = s.system;
  system::SpeciesParams ancilla = system::SpeciesParams::sodium_ancilla();
  system::SpeciesParams data = system::SpeciesParams::cesium_data();
  ancilla.c6_intra_ghz_um6 = c.c6_intra_ancilla;
  data.c6_intra_ghz_um6 = c.c6_intra_data;

  std::vector<AtomSite> sites;
  std::vector<system::InteractionOverride> overrides = c.overrides;
  auto flag = [&](std::size_t i) { return c.data_loaded.empty() || c.data_loaded[i]; };
  switch (c.layout) {
    case Layout::kTwoAtom: {
      const double r = c.v_mhz > 0.0 ? system::vdw_distance(c.c6_inter, c.v_mhz) : 6.0;
      sites = {{Role::kAncilla, {0.0, 0.0}, true, system::level::kGround},
               {Role::kData, {r, 0.0}, flag(0), c.data_level}};
      // Pin V exactly instead of going through r^6.
      overrides.insert(overrides.begin(), {0, 1, c.v_mhz});
      break;
    }
    case Layout::kPlaquette: {
      const double h = c.side_um / 2.0;
      const system::Position corners[4] = {{-h, h}, {h, h}, {-h, -h}, {h, -h}};
      sites.push_back({Role::kAncilla, {0.0, 0.0}, true, system::level::kGround});
      for (std::size_t i = 0; i < 4; ++i) {
        sites.push_back({Role::kData, corners[i], flag(i), c.data_level});
      }
      break;
    }
    case Layout::kExplicit:
      sites = c.sites;
      break;
  }
  if (reference) {
    for (AtomSite& site : sites) {
      if (site.role == Role::kData) site.loaded = false;
    }
  }
  return system::AtomSystem(ancilla, data, c.c6_inter, std::move(sites), std::move(overrides),
                            {c.data_data_interactions});
}

double design_v(const Scenario& s) {
  if (s.gate.v_mhz) return *s.gate.v_mhz;
  Scenario full = s;
  full.system.data_loaded.clear();
  for (AtomSite& site : full.system.sites) site.loaded = true;
  const system::AtomSystem sys = build_system(full);
  const int a = sys.ancilla_site();
  if (a < 0) throw ConfigError("gate.v: auto needs an ancilla site");
  double v = 0.0;
  for (int d : sys.data_sites()) v = std::max(v, sys.interaction_table()(a, d));
  if (!(v > 0.0)) throw ConfigError("gate.v: auto found no ancilla-data interaction");
  return v;
}

dynamics::Experiment build_experiment(const Scenario& s, bool reference) {
  pulse::ReadoutSpec spec;
  spec.gate = s.gate.scheme;
  spec.n = s.gate.n;
  spec.omega_data_mhz = s.gate.omega_data_mhz;
  spec.ancilla_omega_mhz = s.gate.ancilla_omega_mhz;
  spec.instantaneous_ancilla = s.gate.instantaneous_ancilla;
  if (spec.gate == GateScheme::kCompensated) spec.v_mhz = design_v(s);
  // Fail on bad gate parameters before any evolution starts.
  (void)pulse::build_readout_sequence(spec);
  return dynamics::Experiment{
      build_system(s, reference),
      [spec](double phase) {
        pulse::ReadoutSpec p = spec;
        p.ramsey_phase_rad = phase;
        return pulse::build_readout_sequence(p);
      },
      s.system.data_prep, s.measurement, s.postselect_data_survival};
}

dynamics::ScanOptions scan_options(const Scenario& s, bool reference) {
  dynamics::ScanOptions o;
  o.mode = s.run.mode;
  o.noise = s.effective_noise();
  o.monte_carlo.shots_per_phase = s.run.shots;
  o.monte_carlo.seed = s.run.seed;
  o.monte_carlo.trajectory_dt_us = s.run.trajectory_dt_us;
  o.monte_carlo.loading = reference ? LoadingSpec{} : s.system.loading;
  return o;
}

std::string default_output_dir() {
  if (const char* env = std::getenv("RYDSTAB_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "rydstab_out";
}

const char* to_string(Layout layout) {
  switch (layout) {
    case Layout::kTwoAtom: return "two_atom";
    case Layout::kPlaquette: return "plaquette";
    case Layout::kExplicit: break;
  }
  return "explicit";
}

const char* to_string(OutputFormat format) {
  return format == OutputFormat::kJson ? "json" : "csv";
}

}  // namespace rydstab::cli
