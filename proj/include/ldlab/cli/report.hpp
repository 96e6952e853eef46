#ifndef LDLAB_CLI_REPORT_HPP
#define LDLAB_CLI_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ldlab::cli {

enum class Format { Table, Csv, Json };

using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

/// Command output: a named parameter block, result rows over fixed columns,
/// and a summary block.
struct Report {
  std::string command;
  std::vector<std::pair<std::string, Value>> parameters;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  std::vector<std::pair<std::string, Value>> summary;

  void add_row(std::vector<Value> row) { rows.push_back(std::move(row)); }
};

inline std::string format_double(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline std::string to_text(const Value& v, int digits) {
  struct Visitor {
    int digits;
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d, digits); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{digits}, v);
}

inline nlohmann::json to_json(const Value& v) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(bool b) const { return b; }
    nlohmann::json operator()(std::int64_t i) const { return i; }
    nlohmann::json operator()(double d) const {
      if (!std::isfinite(d)) return nullptr;
      return d;
    }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline constexpr int kCsvDigits = 12;
inline constexpr int kTableDigits = 6;

inline void write_csv(const Report& r, std::ostream& out) {
  for (std::size_t j = 0; j < r.columns.size(); ++j) out << (j ? "," : "") << csv_field(r.columns[j]);
  out << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_field(to_text(row[j], kCsvDigits));
    out << "\n";
  }
}

inline void write_table(const Report& r, std::ostream& out) {
  auto block = [&](const std::vector<std::pair<std::string, Value>>& kv) {
    std::size_t width = 0;
    for (const auto& [k, v] : kv) width = std::max(width, k.size());
    for (const auto& [k, v] : kv)
      out << "  " << k << std::string(width - k.size(), ' ') << "  " << to_text(v, kTableDigits) << "\n";
  };
  out << r.command << "\n";
  block(r.parameters);
  if (!r.columns.empty()) {
    std::vector<std::size_t> width(r.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t j = 0; j < r.columns.size(); ++j) width[j] = r.columns[j].size();
    for (const auto& row : r.rows) {
      cells.emplace_back();
      for (std::size_t j = 0; j < row.size(); ++j) {
        cells.back().push_back(to_text(row[j], kTableDigits));
        width[j] = std::max(width[j], cells.back().back().size());
      }
    }
    out << "\n";
    auto line = [&](const std::vector<std::string>& c) {
      for (std::size_t j = 0; j < c.size(); ++j)
        out << "  " << std::string(width[j] - c[j].size(), ' ') << c[j];
      out << "\n";
    };
    line(r.columns);
    for (const auto& c : cells) line(c);
  }
  if (!r.summary.empty()) {
    out << "\n";
    block(r.summary);
  }
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["command"] = r.command;
  j["parameters"] = nlohmann::json::object();
  for (const auto& [k, v] : r.parameters) j["parameters"][k] = to_json(v);
  j["columns"] = r.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) o[r.columns[c]] = to_json(row[c]);
    j["rows"].push_back(std::move(o));
  }
  j["summary"] = nlohmann::json::object();
  for (const auto& [k, v] : r.summary) j["summary"][k] = to_json(v);
  return j;
}

inline void write_report(const Report& r, Format f, std::ostream& out) {
  switch (f) {
    case Format::Table: write_table(r, out); break;
    case Format::Csv: write_csv(r, out); break;
    case Format::Json: out << to_json(r).dump(2) << "\n"; break;
  }
}

} // namespace ldlab::cli

#endif // LDLAB_CLI_REPORT_HPP
