#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "rydstab/analysis.hpp"
#include "rydstab/cli/repro.hpp"
#include "rydstab/cli/run.hpp"
#include "rydstab/cli/schema.hpp"
#include "rydstab/cli/sweep.hpp"
#include "rydstab/error.hpp"
#include "rydstab/pulse.hpp"
#include "rydstab/units.hpp"

namespace {

using namespace rydstab;
using namespace rydstab::cli;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> shots;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<std::string> format;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "random seed");
    app->add_option("--shots", shots, "Monte Carlo shots per phase")->check(CLI::PositiveNumber);
    app->add_option("--mode", mode, "simulation mode")->check(CLI::IsMember({"unitary", "lindblad", "mc"}));
    app->add_option("--out", out, "output directory");
    app->add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  }

  void apply(Scenario& s) const {
    if (seed) s.run.seed = *seed;
    if (shots) s.run.shots = *shots;
    if (mode) {
      s.run.mode = *mode == "mc"        ? dynamics::Mode::kMonteCarlo
                   : *mode == "lindblad" ? dynamics::Mode::kLindblad
                                         : dynamics::Mode::kUnitary;
      if (s.run.mode != dynamics::Mode::kMonteCarlo &&
          s.system.loading.kind != noise::LoadingSpec::Kind::kAsConfigured) {
        throw ConfigError("--mode " + *mode + ": system.loading needs mc mode");
      }
    }
    if (format) s.format = *format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
  }

  std::filesystem::path dir(const Scenario& s, const std::string& leaf) const {
    if (out) return *out;
    if (!s.output_dir.empty()) return s.output_dir;
    return std::filesystem::path(default_output_dir()) / leaf;
  }
};

YAML::Node load_yaml(const std::string& path) {
  try {
    return YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config '" + path + "'");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path + ": YAML syntax error: " + e.what());
  }
}

int cmd_run(const std::string& config, const Overrides& ov) {
  Scenario s = load_scenario(config);
  ov.apply(s);
  const RunOutcome o = run_scenario(s);
  const auto dir = ov.dir(s, s.name);
  write_outputs(o, dir, s.format);
  std::cout << o.log << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_repro(const std::string& id, const std::optional<std::string>& config, bool print_config,
              const Overrides& ov) {
  const std::string& text = default_repro_config(id);
  if (print_config) {
    std::cout << text;
    return 0;
  }
  Scenario s = config ? load_scenario(*config) : parse_scenario_text(text);
  ov.apply(s);
  const ReproResult r = run_repro(id, s);
  const auto dir = ov.dir(s, id);
  write_repro(r, s, dir, s.format);
  std::cout << r.log << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& param, const std::vector<std::string>& values,
              const Overrides& ov) {
  const YAML::Node root = load_yaml(config);
  Scenario base = parse_scenario(root);
  ov.apply(base);
  const Table t = sweep(root, param, values, [&](Scenario& s) { ov.apply(s); });
  const auto dir = ov.dir(base, base.name + "_sweep");
  const auto path = write_table(dir, "sweep", t, base.format);
  std::cout << "wrote " << path.string() << " (" << t.rows.size() << " runs)\n";
  return 0;
}

int cmd_solve(double v, int n) {
  const pulse::CompensationSolution c = pulse::solve_compensation(v, n);
  const nlohmann::json j = {
      {"v_mhz", rounded(v)},
      {"n", n},
      {"delta_mhz", rounded(c.delta_mhz)},
      {"omega_mhz", rounded(c.omega_mhz)},
      {"duration_us", rounded(c.duration_us)},
      {"closure_residual_mhz", pulse::verify_closure(c.delta_mhz, c.omega_mhz, v, n)},
      {"delta_phi_over_pi", rounded(pulse::predicted_delta_phi(c.delta_mhz, c.omega_mhz, v, n) / kPi)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_aa(double delta, double omega) {
  const double phase = pulse::aa_phase(delta, omega);
  std::cout << nlohmann::json{{"delta_mhz", rounded(delta)},
                              {"omega_mhz", rounded(omega)},
                              {"aa_phase_rad", rounded(phase)},
                              {"aa_phase_over_pi", rounded(phase / kPi)}}
                   .dump(2)
            << "\n";
  return 0;
}

int cmd_fit(const std::string& path, int resamples, std::uint64_t seed) {
  const Table t = parse_csv(read_text(path));
  bool counted = true;
  try {
    (void)t.column("shots");
    (void)t.column("successes");
  } catch (const InvalidArgument&) {
    counted = false;
  }
  std::vector<dynamics::FringeRow> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    dynamics::FringeRow r;
    r.phase_rad = t.number(i, "phase_rad");
    r.survival_prob = t.number(i, "survival_prob");
    if (counted) {
      r.shots = static_cast<std::int64_t>(t.number(i, "shots"));
      r.successes = static_cast<std::int64_t>(t.number(i, "successes"));
    }
    rows.push_back(r);
  }
  const analysis::FringeFit fit = fit_rows(rows, resamples, seed);
  nlohmann::json j = fit_json(fit);
  j["source"] = path;
  j["bins"] = t.rows.size();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_validate(const std::optional<std::string>& config, bool schema) {
  if (schema) {
    std::cout << json_schema().dump(2) << "\n";
    return 0;
  }
  if (!config) throw ConfigError("validate: give a config path or --schema");
  const Scenario s = load_scenario(*config);
  std::cout << *config << ": ok (" << s.name << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rydstab: dual-species Rydberg stabilizer readout simulator"};
  app.require_subcommand(1);

  Overrides run_ov, repro_ov, sweep_ov;
  std::string run_config, repro_id, sweep_config, sweep_param, fit_path;
  std::optional<std::string> repro_config, validate_config;
  std::vector<std::string> sweep_values;
  bool print_config = false, print_schema = false;
  double solve_v = 1.1, aa_delta = 0.0, aa_omega = 1.0;
  int solve_n = 1, fit_resamples = 0;
  std::uint64_t fit_seed = 1;

  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", run_config, "scenario YAML")->required();
  run_ov.add_to(run);

  CLI::App* repro = app.add_subcommand("repro", "figure-data experiments");
  repro->add_option("id", repro_id, "one of fig2f, fig3bcd, fig4bc, figS3, figS4, figS5")->required();
  repro->add_option("--config", repro_config, "base config replacing the built-in one");
  repro->add_flag("--print-config", print_config, "print the built-in base config and exit");
  repro_ov.add_to(repro);

  CLI::App* sw = app.add_subcommand("sweep", "one run per parameter value");
  sw->add_option("config", sweep_config, "scenario YAML")->required();
  sw->add_option("--param", sweep_param, "dotted parameter path, e.g. gate.v")->required();
  sw->add_option("--values", sweep_values, "values (YAML scalars)")->delimiter(',')->required();
  sweep_ov.add_to(sw);

  CLI::App* solve = app.add_subcommand("solve-comp", "compensated gate parameters");
  solve->add_option("--v", solve_v, "interaction in MHz")->required();
  solve->add_option("--n", solve_n, "compensation order")->default_val(1);

  CLI::App* aa = app.add_subcommand("aa-phase", "geometric phase of a closed trajectory");
  aa->add_option("--delta", aa_delta, "detuning in MHz")->required();
  aa->add_option("--omega", aa_omega, "Rabi frequency in MHz")->required();

  CLI::App* fit = app.add_subcommand("fit", "fit a fringe CSV");
  fit->add_option("csv", fit_path, "CSV with phase_rad, survival_prob[, shots, successes]")->required();
  fit->add_option("--bootstrap", fit_resamples, "bootstrap resamples (count data only)");
  fit->add_option("--seed", fit_seed, "bootstrap seed");

  CLI::App* val = app.add_subcommand("validate", "check a config against the schema");
  val->add_option("config", validate_config, "scenario YAML");
  val->add_flag("--schema", print_schema, "print the JSON schema instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_config, run_ov);
    if (*repro) return cmd_repro(repro_id, repro_config, print_config, repro_ov);
    if (*sw) return cmd_sweep(sweep_config, sweep_param, sweep_values, sweep_ov);
    if (*solve) return cmd_solve(solve_v, solve_n);
    if (*aa) return cmd_aa(aa_delta, aa_omega);
    if (*fit) return cmd_fit(fit_path, fit_resamples, fit_seed);
    if (*val) return cmd_validate(validate_config, print_schema);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
