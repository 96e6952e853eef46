#ifndef LDLAB_CODE_IO_HPP
#define LDLAB_CODE_IO_HPP

// Code files. Text form: a header line "N t", then N lines of t characters
// from {0,1}. JSON form: {"n": N, "t": t, "rows": ["0101...", ...]}.

#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldlab/code.hpp"
#include "ldlab/errors.hpp"

namespace ldlab::io {

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline void check_row(const std::string& row, int t, std::size_t line) {
  if (static_cast<int>(row.size()) != t)
    throw ParseError("expected " + std::to_string(t) + " columns, found " + std::to_string(row.size()), line);
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] != '0' && row[j] != '1')
      throw ParseError("non-binary character '" + std::string(1, row[j]) + "' at column " + std::to_string(j + 1),
                       line);
}

inline void check_dims(long long n, long long t, std::size_t line) {
  if (n < 1 || t < 1) throw ParseError("N and t must be positive", line);
  if (n > (1 << 24) || t > (1 << 24)) throw ParseError("N or t too large", line);
}

} // namespace detail

inline BinaryCode parse_text(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long long n = 0, t = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = detail::strip(line);
    if (s.empty()) continue;
    std::istringstream hs(s);
    std::string extra;
    if (!(hs >> n >> t) || (hs >> extra)) throw ParseError("expected header \"N t\"", lineno);
    detail::check_dims(n, t, lineno);
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError("empty code file", 0);

  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = detail::strip(line);
    if (s.empty()) continue;
    if (static_cast<long long>(rows.size()) == n) throw ParseError("more than " + std::to_string(n) + " rows", lineno);
    detail::check_row(s, static_cast<int>(t), lineno);
    rows.push_back(s);
  }
  if (static_cast<long long>(rows.size()) != n)
    throw ParseError("expected " + std::to_string(n) + " rows, found " + std::to_string(rows.size()), lineno);
  return BinaryCode::from_rows(rows);
}

inline BinaryCode parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("t") || !j.contains("rows"))
    throw ParseError("JSON code needs keys \"n\", \"t\" and \"rows\"", 0);
  if (!j["n"].is_number_integer() || !j["t"].is_number_integer() || !j["rows"].is_array())
    throw ParseError("JSON code: \"n\" and \"t\" must be integers and \"rows\" an array", 0);
  const long long n = j["n"], t = j["t"];
  detail::check_dims(n, t, 0);
  if (static_cast<long long>(j["rows"].size()) != n)
    throw ParseError("expected " + std::to_string(n) + " rows, found " + std::to_string(j["rows"].size()), 0);
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < j["rows"].size(); ++i) {
    if (!j["rows"][i].is_string()) throw ParseError("row " + std::to_string(i + 1) + " is not a string", 0);
    std::string r = j["rows"][i];
    try {
      detail::check_row(r, static_cast<int>(t), 0);
    } catch (const ParseError& e) {
      throw ParseError("row " + std::to_string(i + 1) + ": " + e.what(), 0);
    }
    rows.push_back(std::move(r));
  }
  return BinaryCode::from_rows(rows);
}

/// Parses either form; JSON is recognized by a leading '{'.
inline BinaryCode parse_code(const std::string& text) {
  const auto s = detail::strip(text);
  if (!s.empty() && s.front() == '{') return parse_json(s);
  std::istringstream in(text);
  return parse_text(in);
}

inline BinaryCode load_code(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path, 0);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_code(ss.str());
}

inline std::string to_text(const BinaryCode& X) {
  std::string out = std::to_string(X.rows()) + " " + std::to_string(X.cols()) + "\n";
  for (const auto& r : X.to_rows()) out += r + "\n";
  return out;
}

inline std::string to_json(const BinaryCode& X) {
  nlohmann::json j{{"n", X.rows()}, {"t", X.cols()}, {"rows", X.to_rows()}};
  return j.dump();
}

} // namespace ldlab::io

#endif // LDLAB_CODE_IO_HPP
