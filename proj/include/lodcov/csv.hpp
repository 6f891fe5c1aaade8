#pragma once

// Minimal RFC 4180 style CSV/TSV helpers shared by the loaders and writers.
// Records are single physical lines; quoted fields may contain the delimiter
// and doubled quotes but not line breaks.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace lodcov {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace csv {

inline std::vector<std::string> split_record(std::string_view line, char delim = ',') {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted field in: " + std::string(line));
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string escape(std::string_view field, char delim = ',') {
  if (field.find_first_of(std::string{delim, '"', '\n', '\r'}) == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_record(std::ostream& os, const std::vector<std::string>& fields, char delim = ',') {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << delim;
    os << escape(fields[i], delim);
  }
  os << '\n';
}

// A parsed file: header plus data rows, each row checked for column count.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

inline Table read_stream(std::istream& in, const std::string& what, char delim = ',') {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      t.header = split_record(line, delim);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_record(line, delim);
    if (fields.size() != t.header.size())
      throw DataError(what + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " columns, got " +
                      std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header) throw DataError(what + ": missing header row");
  return t;
}

inline Table read_file(const std::string& path, char delim = ',') {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
  return read_stream(in, path, delim);
}

// Requires the header to be exactly `expected`.
inline void require_header(const Table& t, const std::vector<std::string>& expected,
                           const std::string& what) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw DataError(what + ": expected header `" + want + "`");
  }
}

inline std::uint64_t parse_count(std::string_view s, const std::string& where) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw DataError(where + ": not a non-negative integer: `" + std::string(s) + "`");
  return v;
}

// Shortest round-trip representation; stable across runs.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, p);
}

}  // namespace csv
}  // namespace lodcov
