#pragma once

// Column tables written as CSV or JSON, plus small output helpers.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydstab/analysis.hpp"
#include "rydstab/cli/scenario.hpp"

namespace rydstab::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Throws InvalidArgument when the row width differs from the header.
  void add(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

// %.9g, with inf/nan spelled "inf", "-inf", "nan".
std::string format_number(double v);
// Value rounded to 9 significant digits (JSON output).
nlohmann::json rounded(double v);

std::string to_csv(const Table& table);
nlohmann::json to_json(const Table& table);
// Reads a CSV written by to_csv (numbers become double, everything else string).
Table parse_csv(const std::string& text);

// Writes <dir>/<stem>.csv or .json. Returns the path written.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const Table& table, OutputFormat format);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::string sha256_hex(const std::string& data);

// {value, xi_b, xi_f, xi_total} per parameter plus fit diagnostics.
nlohmann::json fit_json(const analysis::FringeFit& fit);

}  // namespace rydstab::cli
