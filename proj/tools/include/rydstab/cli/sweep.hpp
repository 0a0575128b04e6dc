#pragma once

// One scenario run per value of a single config parameter.

#include <functional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "rydstab/cli/run.hpp"
#include "rydstab/cli/table.hpp"

namespace rydstab::cli {

// Copy of `root` with the dotted `path` set to `value` (parsed as YAML).
YAML::Node with_value(const YAML::Node& root, const std::string& path, const std::string& value);

// Long-form table: parameter, value, then every numeric report scalar.
// Throws ConfigError for an empty value list or a path outside the schema
// (with the nearest valid paths). `adjust` runs on each parsed scenario.
Table sweep(const YAML::Node& root, const std::string& path, const std::vector<std::string>& values,
            const std::function<void(Scenario&)>& adjust = nullptr);

}  // namespace rydstab::cli
