#pragma once

// Declarative schema of the scenario config. Validation walks a YAML tree and
// reports every problem with its dotted path and source position.

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

namespace rydstab::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldKind {
  kSection,
  kNumber,
  kInteger,
  kBool,
  kString,
  kEnum,
  kNumberOrAuto,
  kPhaseGrid,   // integer point count or list of numbers
  kBoolList,
  kObjectList,  // list of objects described by `children`
};

struct Field {
  std::string name;
  FieldKind kind = FieldKind::kNumber;
  std::string doc;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  bool min_exclusive = false;
  std::vector<std::string> choices;
  std::vector<Field> children;
};

// Root of the scenario schema.
const Field& scenario_schema();

// Throws ConfigError listing every violation ("path (line L, column C): ...").
void validate(const YAML::Node& root);

// Leaf paths ("noise.ancilla.t2_star", ...) of the schema.
std::vector<std::string> leaf_paths();
const Field* find_field(const std::string& dotted_path);

// Up to `limit` schema paths (sections included) closest to `path` by edit
// distance. A path ending in a known parameter name also matches.
std::vector<std::string> nearest_paths(const std::string& path, std::size_t limit = 3);

// JSON Schema (draft 2020-12) rendering of scenario_schema().
nlohmann::json json_schema();

}  // namespace rydstab::cli
