#include "rydstab/cli/table.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rydstab/error.hpp"

namespace rydstab::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("Table::add: row has " + std::to_string(row.size()) + " cells, header has " +
                          std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InvalidArgument("Table: no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  const Cell& c = rows.at(row).at(column(name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw InvalidArgument("Table: column '" + name + "' is not numeric");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

nlohmann::json rounded(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return std::stod(format_number(v));
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return rounded(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << cell_text(table.columns[i]);
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = cell_json(row[i]);
    rows.push_back(r);
  }
  return {{"columns", table.columns}, {"rows", rows}};
}

Table parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line)) throw InvalidArgument("parse_csv: empty input");
  t.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<Cell> row;
    for (const std::string& field : split_csv_line(line)) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (!field.empty() && end == field.c_str() + field.size()) {
        row.emplace_back(v);
      } else {
        row.emplace_back(field);
      }
    }
    t.add(std::move(row));
  }
  return t;
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const Table& table, OutputFormat format) {
  const std::filesystem::path path =
      dir / (stem + (format == OutputFormat::kJson ? ".json" : ".csv"));
  write_text(path, format == OutputFormat::kJson ? to_json(table).dump(2) + "\n" : to_csv(table));
  return path;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

nlohmann::json fit_json(const analysis::FringeFit& fit) {
  auto param = [](double v, const analysis::ParamError& e) {
    return nlohmann::json{{"value", rounded(v)},
                          {"xi_b", rounded(e.bootstrap)},
                          {"xi_f", rounded(e.fit)},
                          {"xi_total", rounded(e.total())}};
  };
  nlohmann::json j;
  j["contrast"] = param(fit.contrast, fit.contrast_err);
  j["phase_rad"] = param(fit.phase, fit.phase_err);
  j["offset"] = param(fit.offset, fit.offset_err);
  j["phase_defined"] = fit.phase_defined;
  j["at_bound"] = fit.at_bound;
  j["chi2"] = rounded(fit.chi2);
  j["dof"] = fit.dof;
  return j;
}

}  // namespace rydstab::cli
