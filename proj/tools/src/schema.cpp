#include "rydstab/cli/schema.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rydstab::cli {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field make(std::string name, FieldKind kind, std::string doc = {}) {
  Field f;
  f.name = std::move(name);
  f.kind = kind;
  f.doc = std::move(doc);
  return f;
}

Field section(std::string name, std::string doc, std::vector<Field> children) {
  Field f = make(std::move(name), FieldKind::kSection, std::move(doc));
  f.children = std::move(children);
  return f;
}

Field number(std::string name, std::string doc, double min = -kInf, double max = kInf,
             bool min_exclusive = false) {
  Field f = make(std::move(name), FieldKind::kNumber, std::move(doc));
  f.min = min;
  f.max = max;
  f.min_exclusive = min_exclusive;
  return f;
}

Field positive(std::string name, std::string doc) {
  return number(std::move(name), std::move(doc), 0.0, kInf, true);
}

Field probability(std::string name, std::string doc) {
  return number(std::move(name), std::move(doc), 0.0, 1.0);
}

Field integer(std::string name, std::string doc, double min, double max = kInf) {
  Field f = make(std::move(name), FieldKind::kInteger, std::move(doc));
  f.min = min;
  f.max = max;
  return f;
}

Field boolean(std::string name, std::string doc) {
  return make(std::move(name), FieldKind::kBool, std::move(doc));
}

Field text(std::string name, std::string doc) {
  return make(std::move(name), FieldKind::kString, std::move(doc));
}

Field choice(std::string name, std::string doc, std::vector<std::string> choices) {
  Field f = make(std::move(name), FieldKind::kEnum, std::move(doc));
  f.choices = std::move(choices);
  return f;
}

Field species_noise(std::string name) {
  return section(name, name + " species noise",
                 {positive("t2_star", "quasi-static Ramsey dephasing time in us (.inf disables)"),
                  positive("rabi_tau", "driven Rabi envelope time in us (.inf disables)"),
                  probability("scattering_loss", "loss probability per sequence"),
                  probability("imaging_loss", "loss probability of the detection image"),
                  positive("calibration_omega", "Rabi frequency (MHz) used to calibrate rabi_tau")});
}

Field build_schema() {
  Field site_item = section("", "", {
      choice("role", "atom role", {"ancilla", "data"}),
      number("x", "x position in um"),
      number("y", "y position in um"),
      boolean("loaded", "whether the site holds an atom"),
      integer("level", "initial level index", 0, 2),
      number("detuning_offset", "static Rydberg shift in MHz"),
      number("omega_scale", "local drive amplitude factor", 0.0),
  });
  Field sites = make("sites", FieldKind::kObjectList, "explicit atom sites (layout: explicit)");
  sites.children = site_item.children;

  Field override_item = section("", "", {
      integer("a", "first site index", 0),
      integer("b", "second site index", 0),
      number("v", "interaction in MHz", 0.0),
  });
  Field overrides = make("overrides", FieldKind::kObjectList, "measured interactions replacing C6/r^6");
  overrides.children = override_item.children;

  Field data_loaded = make("data_loaded", FieldKind::kBoolList, "loading flag per data site (1 for two_atom, 4 for plaquette)");

  Field gate_v = make("v", FieldKind::kNumberOrAuto, "design interaction in MHz, or auto for the largest ancilla-data V");
  gate_v.min = 0.0;
  gate_v.min_exclusive = true;

  Field phases = make("phases", FieldKind::kPhaseGrid, "number of evenly spaced Ramsey phases over 2 pi, or an explicit list in rad");

  return section("", "scenario", {
      text("name", "free-form scenario label"),
      section("system", "atoms and geometry", {
          choice("layout", "atom arrangement", {"two_atom", "plaquette", "explicit"}),
          number("v", "two_atom: ancilla-data interaction in MHz", 0.0),
          positive("side", "plaquette: side length in um"),
          data_loaded,
          integer("data_level", "initial data level (0, 1 or 2 = |r>)", 0, 2),
          choice("data_prep", "data preparation", {"site_levels", "plus"}),
          boolean("data_data_interactions", "include data-data van der Waals terms"),
          positive("c6_inter", "interspecies C6 in GHz um^6"),
          positive("c6_intra_data", "data-data C6 in GHz um^6"),
          positive("c6_intra_ancilla", "ancilla-ancilla C6 in GHz um^6"),
          sites,
          overrides,
          section("loading", "per-shot loading of data sites (Monte Carlo only)", {
              choice("kind", "loading rule", {"as_configured", "bernoulli", "fixed_count"}),
              probability("probability", "bernoulli loading probability"),
              integer("count", "fixed_count: loaded data atoms", 0),
          }),
      }),
      section("gate", "readout gate", {
          choice("scheme", "data 2pi pulse", {"resonant", "compensated"}),
          gate_v,
          integer("n", "compensation order", 1, 50),
          positive("omega_data", "resonant data Rabi frequency in MHz"),
          positive("ancilla_omega", "ancilla pi/2 Rabi frequency in MHz"),
          boolean("instantaneous_ancilla", "ideal zero-duration ancilla pulses"),
      }),
      section("noise", "noise model", {
          boolean("enabled", "false runs noiseless"),
          species_noise("ancilla"),
          species_noise("data"),
          probability("gate_infidelity_data_2pi", "classical data gate loss probability"),
          choice("data_damping", "data Rabi damping mechanism", {"lindblad", "classical_loss"}),
          number("v_fluctuation_fraction", "relative interaction fluctuation", 0.0, 1.0),
          choice("v_distribution", "interaction fluctuation law", {"uniform", "gaussian"}),
          probability("spam", "probability a data atom meant for |1> starts in |0>"),
          probability("blast_infidelity", "probability a data |1> survives the blast"),
          number("omega_gradient_per_um", "fractional Rabi gradient along x per um"),
      }),
      section("measurement", "detection", {
          choice("scheme", "data loss map", {"rydberg_loss", "blast_1", "both"}),
          boolean("postselect_data_survival", "discard shots that lose a data atom"),
      }),
      section("run", "execution", {
          choice("mode", "simulation mode", {"unitary", "lindblad", "mc"}),
          integer("shots", "Monte Carlo shots per phase", 1),
          integer("seed", "random seed", 0),
          phases,
          positive("trajectory_dt", "Monte Carlo trajectory step in us"),
          boolean("reference", "also run with every data site unloaded and report delta_phi"),
          integer("bootstrap_resamples", "bootstrap resamples for Monte Carlo fits (0 disables)", 0),
      }),
      section("output", "artifacts", {
          text("dir", "output directory"),
          choice("format", "table format", {"csv", "json"}),
      }),
  });
}

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return "";
  std::ostringstream os;
  os << " (line " << m.line + 1 << ", column " << m.column + 1 << ")";
  return os.str();
}

std::string join(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

bool as_number(const YAML::Node& node, double& out) {
  if (!node.IsScalar()) return false;
  try {
    out = node.as<double>();
    return true;
  } catch (const YAML::Exception&) {
    return false;
  }
}

void check_range(const Field& f, double v, const std::string& path, const YAML::Node& node,
                 std::vector<std::string>& errors) {
  std::ostringstream msg;
  if (std::isnan(v)) {
    msg << path << where(node) << ": must be a number, got nan";
  } else if (f.min_exclusive ? !(v > f.min) : !(v >= f.min)) {
    msg << path << where(node) << ": must be " << (f.min_exclusive ? "> " : ">= ") << f.min
        << ", got " << v;
  } else if (!(v <= f.max)) {
    msg << path << where(node) << ": must be <= " << f.max << ", got " << v;
  } else {
    return;
  }
  errors.push_back(msg.str());
}

void check_scalar(const Field& f, const YAML::Node& node, const std::string& path,
                  std::vector<std::string>& errors);

void check_mapping(const std::vector<Field>& children, const YAML::Node& node,
                   const std::string& path, std::vector<std::string>& errors) {
  if (!node.IsMap()) {
    errors.push_back((path.empty() ? std::string("<root>") : path) + where(node) +
                     ": expected a mapping");
    return;
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const auto it = std::find_if(children.begin(), children.end(),
                                 [&](const Field& c) { return c.name == key; });
    const std::string child_path = join(path, key);
    if (it == children.end()) {
      std::string hint;
      const auto near = nearest_paths(child_path, 1);
      if (!near.empty()) hint = " (did you mean '" + near.front() + "'?)";
      errors.push_back(child_path + where(kv.first) + ": unknown key" + hint);
      continue;
    }
    check_scalar(*it, kv.second, child_path, errors);
  }
}

void check_scalar(const Field& f, const YAML::Node& node, const std::string& path,
                  std::vector<std::string>& errors) {
  double v = 0.0;
  switch (f.kind) {
    case FieldKind::kSection:
      check_mapping(f.children, node, path, errors);
      return;
    case FieldKind::kNumber:
      if (!as_number(node, v)) {
        errors.push_back(path + where(node) + ": expected a number");
        return;
      }
      check_range(f, v, path, node, errors);
      return;
    case FieldKind::kInteger:
      if (!as_number(node, v) || v != std::floor(v) || std::isinf(v)) {
        errors.push_back(path + where(node) + ": expected an integer");
        return;
      }
      check_range(f, v, path, node, errors);
      return;
    case FieldKind::kBool:
      try {
        if (node.IsScalar()) {
          (void)node.as<bool>();
          return;
        }
      } catch (const YAML::Exception&) {
      }
      errors.push_back(path + where(node) + ": expected true or false");
      return;
    case FieldKind::kString:
      if (!node.IsScalar()) errors.push_back(path + where(node) + ": expected a string");
      return;
    case FieldKind::kEnum: {
      const std::string s = node.IsScalar() ? node.as<std::string>() : "";
      if (std::find(f.choices.begin(), f.choices.end(), s) == f.choices.end()) {
        std::string list;
        for (const std::string& c : f.choices) list += (list.empty() ? "" : ", ") + c;
        errors.push_back(path + where(node) + ": expected one of {" + list + "}, got '" + s + "'");
      }
      return;
    }
    case FieldKind::kNumberOrAuto:
      if (node.IsScalar() && node.as<std::string>() == "auto") return;
      if (!as_number(node, v)) {
        errors.push_back(path + where(node) + ": expected a number or 'auto'");
        return;
      }
      check_range(f, v, path, node, errors);
      return;
    case FieldKind::kPhaseGrid:
      if (node.IsSequence()) {
        if (node.size() < 4) errors.push_back(path + where(node) + ": need at least 4 phases");
        for (std::size_t i = 0; i < node.size(); ++i) {
          if (!as_number(node[i], v) || !std::isfinite(v)) {
            errors.push_back(path + "[" + std::to_string(i) + "]" + where(node[i]) +
                             ": expected a finite number");
          }
        }
        return;
      }
      if (!as_number(node, v) || v != std::floor(v) || v < 4) {
        errors.push_back(path + where(node) + ": expected an integer >= 4 or a list of phases");
      }
      return;
    case FieldKind::kBoolList:
      if (!node.IsSequence()) {
        errors.push_back(path + where(node) + ": expected a list of booleans");
        return;
      }
      for (std::size_t i = 0; i < node.size(); ++i) {
        const Field item = make("", FieldKind::kBool);
        check_scalar(item, node[i], path + "[" + std::to_string(i) + "]", errors);
      }
      return;
    case FieldKind::kObjectList:
      if (!node.IsSequence()) {
        errors.push_back(path + where(node) + ": expected a list");
        return;
      }
      for (std::size_t i = 0; i < node.size(); ++i) {
        check_mapping(f.children, node[i], path + "[" + std::to_string(i) + "]", errors);
      }
      return;
  }
}

void collect_leaves(const Field& f, const std::string& prefix, std::vector<std::string>& out) {
  for (const Field& c : f.children) {
    const std::string p = join(prefix, c.name);
    if (c.kind == FieldKind::kSection) {
      collect_leaves(c, p, out);
    } else {
      out.push_back(p);
    }
  }
}

void collect_all(const Field& f, const std::string& prefix, std::vector<std::string>& out) {
  for (const Field& c : f.children) {
    const std::string p = join(prefix, c.name);
    out.push_back(p);
    if (c.kind == FieldKind::kSection) collect_all(c, p, out);
  }
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

nlohmann::json field_json(const Field& f) {
  nlohmann::json j;
  if (!f.doc.empty()) j["description"] = f.doc;
  auto bounds = [&](nlohmann::json& t) {
    if (std::isfinite(f.min)) t[f.min_exclusive ? "exclusiveMinimum" : "minimum"] = f.min;
    if (std::isfinite(f.max)) t["maximum"] = f.max;
  };
  switch (f.kind) {
    case FieldKind::kSection: {
      j["type"] = "object";
      j["additionalProperties"] = false;
      nlohmann::json props = nlohmann::json::object();
      for (const Field& c : f.children) props[c.name] = field_json(c);
      j["properties"] = props;
      break;
    }
    case FieldKind::kNumber:
      j["type"] = "number";
      bounds(j);
      break;
    case FieldKind::kInteger:
      j["type"] = "integer";
      bounds(j);
      break;
    case FieldKind::kBool:
      j["type"] = "boolean";
      break;
    case FieldKind::kString:
      j["type"] = "string";
      break;
    case FieldKind::kEnum:
      j["enum"] = f.choices;
      break;
    case FieldKind::kNumberOrAuto: {
      nlohmann::json num = {{"type", "number"}};
      bounds(num);
      j["oneOf"] = {num, {{"const", "auto"}}};
      break;
    }
    case FieldKind::kPhaseGrid:
      j["oneOf"] = {{{"type", "integer"}, {"minimum", 4}},
                    {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 4}}};
      break;
    case FieldKind::kBoolList:
      j["type"] = "array";
      j["items"] = {{"type", "boolean"}};
      break;
    case FieldKind::kObjectList: {
      Field item = section("", "", f.children);
      j["type"] = "array";
      j["items"] = field_json(item);
      break;
    }
  }
  return j;
}

}  // namespace

const Field& scenario_schema() {
  static const Field root = build_schema();
  return root;
}

void validate(const YAML::Node& root) {
  std::vector<std::string> errors;
  if (!root || root.IsNull()) {
    throw ConfigError("config is empty");
  }
  check_mapping(scenario_schema().children, root, "", errors);
  if (errors.empty()) return;
  std::string msg = "invalid config:";
  for (const std::string& e : errors) msg += "\n  " + e;
  throw ConfigError(msg);
}

std::vector<std::string> leaf_paths() {
  std::vector<std::string> out;
  collect_leaves(scenario_schema(), "", out);
  return out;
}

const Field* find_field(const std::string& dotted_path) {
  const Field* cur = &scenario_schema();
  std::istringstream in(dotted_path);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (cur->kind != FieldKind::kSection) return nullptr;
    const auto it = std::find_if(cur->children.begin(), cur->children.end(),
                                 [&](const Field& c) { return c.name == part; });
    if (it == cur->children.end()) return nullptr;
    cur = &*it;
  }
  return cur == &scenario_schema() ? nullptr : cur;
}

std::vector<std::string> nearest_paths(const std::string& path, std::size_t limit) {
  auto last = [](const std::string& p) { return p.substr(p.rfind('.') + 1); };
  std::vector<std::string> candidates;
  collect_all(scenario_schema(), "", candidates);
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const std::string& p : candidates) {
    std::size_t d = edit_distance(path, p);
    // A known parameter name under the wrong section is a near miss.
    if (last(p) == last(path)) d = std::min<std::size_t>(d, 1);
    scored.emplace_back(d, p);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (const auto& [d, p] : scored) {
    if (out.size() >= limit) break;
    if (d <= std::max<std::size_t>(3, path.size() / 3)) out.push_back(p);
  }
  return out;
}

nlohmann::json json_schema() {
  nlohmann::json j = field_json(scenario_schema());
  j["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  j["title"] = "rydstab scenario";
  return j;
}

}  // namespace rydstab::cli
