#include "rydstab/cli/sweep.hpp"

#include <map>
#include <set>
#include <sstream>

#include "rydstab/cli/schema.hpp"

namespace rydstab::cli {

YAML::Node with_value(const YAML::Node& root, const std::string& path, const std::string& value) {
  YAML::Node copy = root && root.IsMap() ? YAML::Clone(root) : YAML::Node(YAML::NodeType::Map);
  std::vector<std::string> parts;
  std::istringstream in(path);
  for (std::string p; std::getline(in, p, '.');) parts.push_back(p);
  // operator[] on a non-const node returns a handle; walking by value keeps the
  // chain attached to `copy`.
  YAML::Node cur = copy;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = cur[parts[i]];
    if (!next.IsMap()) {
      cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = cur[parts[i]];
    }
    cur.reset(next);
  }
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path + ": cannot parse value '" + value + "'");
  }
  cur[parts.back()] = parsed;
  return copy;
}

Table sweep(const YAML::Node& root, const std::string& path, const std::vector<std::string>& values,
            const std::function<void(Scenario&)>& adjust) {
  if (values.empty()) throw ConfigError("sweep: empty value list");
  const Field* field = find_field(path);
  if (field == nullptr || field->kind == FieldKind::kSection) {
    std::string msg = "sweep: '" + path + "' is not a config parameter";
    const auto near = nearest_paths(path);
    if (!near.empty()) {
      msg += "; nearest:";
      for (const std::string& p : near) msg += " " + p;
    }
    throw ConfigError(msg);
  }

  std::vector<std::map<std::string, double>> scalars;
  std::set<std::string> keys;
  for (const std::string& v : values) {
    Scenario s = parse_scenario(with_value(root, path, v));
    if (adjust) adjust(s);
    scalars.push_back(report_scalars(run_scenario(s).report));
    for (const auto& [k, x] : scalars.back()) keys.insert(k);
  }

  Table t{{"parameter", "value"}, {}};
  t.columns.insert(t.columns.end(), keys.begin(), keys.end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::vector<Cell> row{path, values[i]};
    for (const std::string& k : keys) {
      const auto it = scalars[i].find(k);
      if (it == scalars[i].end()) {
        row.emplace_back(std::string());
      } else {
        row.emplace_back(it->second);
      }
    }
    t.add(std::move(row));
  }
  return t;
}

}  // namespace rydstab::cli
