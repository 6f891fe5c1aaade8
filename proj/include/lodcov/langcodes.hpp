#pragma once

// Language tag normalization and mapping onto WALS languoids.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lodcov/csv.hpp"

namespace lodcov {

struct LanguageTag {
  std::string canonical;       // lowercase BCP-47
  std::string primary_subtag;  // first subtag

  // Primary subtag is not 2-3 ASCII letters (e.g. `i-klingon`, `x-...`).
  bool nonstandard() const {
    return primary_subtag.size() < 2 || primary_subtag.size() > 3 ||
           !std::all_of(primary_subtag.begin(), primary_subtag.end(), [](char c) { return c >= 'a' && c <= 'z'; });
  }
  friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
};

inline LanguageTag normalize_tag(std::string_view raw) {
  while (!raw.empty() && (raw.front() == ' ' || raw.front() == '\t')) raw.remove_prefix(1);
  while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t')) raw.remove_suffix(1);
  if (raw.empty()) throw std::invalid_argument("empty language tag");
  LanguageTag t;
  t.canonical.reserve(raw.size());
  for (char c : raw) t.canonical.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  t.primary_subtag = t.canonical.substr(0, t.canonical.find('-'));
  return t;
}

struct Languoid {
  std::string wals_code;
  std::string name;
  std::optional<std::string> iso639_3;
  bool is_written = true;
  friend bool operator==(const Languoid&, const Languoid&) = default;
};

struct WalsIndex {
  std::map<std::string, Languoid> by_iso;
  std::vector<Languoid> all;  // ascending wals_code
  std::vector<std::string> warnings;

  const Languoid* find(std::string_view wals_code) const {
    auto it = std::lower_bound(all.begin(), all.end(), wals_code,
                               [](const Languoid& l, std::string_view c) { return l.wals_code < c; });
    return (it != all.end() && it->wals_code == wals_code) ? &*it : nullptr;
  }
};

namespace detail {

inline std::optional<std::size_t> find_column(const csv::Table& t, std::initializer_list<std::string_view> names) {
  for (auto n : names)
    if (auto c = t.column(n)) return c;
  return std::nullopt;
}

inline bool parse_flag(std::string_view v, const std::string& where) {
  std::string s;
  for (char c : v) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "1" || s == "true" || s == "yes" || s == "y") return true;
  if (s == "0" || s == "false" || s == "no" || s == "n") return false;
  throw DataError(where + ": not a boolean: `" + std::string(v) + "`");
}

inline bool is_iso639_3(std::string_view s) {
  return s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace detail

inline std::string normalize_iso(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\t') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

// Loads a WALS languoid export. Accepted column names: `wals_code`/`id`/`ID`,
// `name`/`Name`, `iso639_3`/`iso_code`/`ISO639P3code`, and an optional
// `written` flag column. When `written_filter` is set, writtenness comes from
// the flag column, else from `written_list_path` (CSV with a `wals_code`
// column). With neither available every languoid stays in scope and a warning
// is recorded.
inline WalsIndex load_wals(const std::string& languoid_csv_path, bool written_filter,
                           const std::optional<std::string>& written_list_path = std::nullopt) {
  auto table = csv::read_file(languoid_csv_path);
  auto code_col = detail::find_column(table, {"wals_code", "id", "ID", "wals code"});
  auto name_col = detail::find_column(table, {"name", "Name"});
  auto iso_col = detail::find_column(table, {"iso639_3", "iso_code", "ISO639P3code", "iso"});
  if (!code_col || !name_col || !iso_col)
    throw DataError(languoid_csv_path + ": missing wals_code/name/iso639_3 column");
  auto written_col = detail::find_column(table, {"written", "is_written"});

  std::optional<std::set<std::string>> written_set;
  if (written_filter && !written_col && written_list_path) {
    auto wt = csv::read_file(*written_list_path);
    auto c = detail::find_column(wt, {"wals_code", "id", "ID"});
    if (!c) throw DataError(*written_list_path + ": missing wals_code column");
    written_set.emplace();
    for (const auto& row : wt.rows) written_set->insert(row[*c]);
  }

  WalsIndex idx;
  if (written_filter && !written_col && !written_set)
    idx.warnings.push_back("no writtenness information; all WALS languoids treated as written");

  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = languoid_csv_path + ":" + std::to_string(table.line_numbers[r]);
    Languoid l;
    l.wals_code = row[*code_col];
    l.name = row[*name_col];
    if (l.wals_code.empty()) throw DataError(where + ": empty wals_code");
    if (!seen.insert(l.wals_code).second) throw DataError(where + ": duplicate wals_code `" + l.wals_code + "`");
    std::string iso = normalize_iso(row[*iso_col]);
    if (!iso.empty()) {
      if (!detail::is_iso639_3(iso)) throw DataError(where + ": invalid iso639_3 `" + row[*iso_col] + "`");
      l.iso639_3 = iso;
    }
    if (written_col)
      l.is_written = detail::parse_flag(row[*written_col], where);
    else if (written_set)
      l.is_written = written_set->contains(l.wals_code);
    if (written_filter && !l.is_written) continue;
    idx.all.push_back(std::move(l));
  }
  std::sort(idx.all.begin(), idx.all.end(), [](const auto& a, const auto& b) { return a.wals_code < b.wals_code; });
  // Several WALS codes may share an ISO code; ascending order makes the
  // smallest wals_code win.
  for (const auto& l : idx.all)
    if (l.iso639_3) idx.by_iso.try_emplace(*l.iso639_3, l);
  return idx;
}

// Lookup tables bridging tags to ISO 639-3: 2-letter codes (`iso1,iso3`) and
// optional overrides for irregular codes such as Wikipedia edition names
// (`edition,iso3`, matched on the full canonical tag first).
struct CodeBridge {
  std::map<std::string, std::string> iso1_to_iso3;
  std::map<std::string, std::string> overrides;
};

inline std::map<std::string, std::string> load_code_map(const std::string& path, const std::string& key_col,
                                                        const std::string& value_col) {
  auto t = csv::read_file(path);
  csv::require_header(t, {key_col, value_col}, path);
  std::map<std::string, std::string> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + ":" + std::to_string(t.line_numbers[r]);
    auto key = normalize_tag(t.rows[r][0]).canonical;
    auto value = normalize_iso(t.rows[r][1]);
    if (!detail::is_iso639_3(value)) throw DataError(where + ": invalid iso639_3 `" + t.rows[r][1] + "`");
    if (!out.emplace(key, value).second) throw DataError(where + ": duplicate key `" + key + "`");
  }
  return out;
}

inline CodeBridge load_bridge(const std::string& iso_bridge_path,
                              const std::optional<std::string>& overrides_path = std::nullopt) {
  CodeBridge b;
  b.iso1_to_iso3 = load_code_map(iso_bridge_path, "iso1", "iso3");
  if (overrides_path) b.overrides = load_code_map(*overrides_path, "edition", "iso3");
  return b;
}

inline std::optional<Languoid> map_tag_to_languoid(const LanguageTag& tag, const WalsIndex& idx,
                                                   const CodeBridge& bridge) {
  auto lookup = [&](const std::string& iso) -> std::optional<Languoid> {
    auto it = idx.by_iso.find(iso);
    if (it == idx.by_iso.end()) return std::nullopt;
    return it->second;
  };
  if (auto o = bridge.overrides.find(tag.canonical); o != bridge.overrides.end()) return lookup(o->second);
  if (auto o = bridge.overrides.find(tag.primary_subtag); o != bridge.overrides.end()) return lookup(o->second);
  if (tag.nonstandard()) return std::nullopt;
  if (tag.primary_subtag.size() == 3) return lookup(tag.primary_subtag);
  auto b = bridge.iso1_to_iso3.find(tag.primary_subtag);
  if (b == bridge.iso1_to_iso3.end()) return std::nullopt;
  return lookup(b->second);
}

struct FoldResult {
  std::map<std::string, std::uint64_t> mapped;    // wals_code -> summed count
  std::map<std::string, std::uint64_t> unmapped;  // canonical tag -> count
};

// Sums counts of tags that resolve to the same languoid. Input keys are raw
// tags; equal canonical forms are summed too.
inline FoldResult fold_counts_by_languoid(const std::map<std::string, std::uint64_t>& tag_counts,
                                          const WalsIndex& idx, const CodeBridge& bridge) {
  FoldResult out;
  for (const auto& [raw, count] : tag_counts) {
    auto tag = normalize_tag(raw);
    if (auto l = map_tag_to_languoid(tag, idx, bridge))
      out.mapped[l->wals_code] += count;
    else
      out.unmapped[tag.canonical] += count;
  }
  return out;
}

}  // namespace lodcov
