#pragma once

// The per-languoid coverage table and the sets/distributions derived from it.
//
// L^LOD = languoids whose aggregated entity count is > 0
// L^TXT = languoids with an article count > 0
// L*    = L^LOD ∩ L^TXT
//
// Aggregation across sources is a plain sum: sources are assumed to hold
// distinct entities (no cross-source deduplication).

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lodcov/csv.hpp"
#include "lodcov/langcodes.hpp"

namespace lodcov {

using SourceId = std::string;

struct CoverageRecord {
  Languoid languoid;
  std::map<SourceId, std::uint64_t> entity_counts;
  std::optional<std::uint64_t> article_count;

  friend bool operator==(const CoverageRecord&, const CoverageRecord&) = default;
};

// Sum over `selected` sources; sources missing from the record contribute 0.
inline std::uint64_t aggregate_entity_count(const CoverageRecord& record, std::span<const SourceId> selected) {
  std::uint64_t total = 0;
  for (const auto& s : selected)
    if (auto it = record.entity_counts.find(s); it != record.entity_counts.end()) total += it->second;
  return total;
}

struct Distributions {
  std::vector<std::string> langs;  // wals codes in L*, ascending
  std::vector<std::uint64_t> entity;
  std::vector<std::uint64_t> article;
};

class CoverageTable {
 public:
  CoverageTable() = default;
  CoverageTable(std::vector<SourceId> sources, std::map<std::string, CoverageRecord> records)
      : sources_(std::move(sources)), records_(std::move(records)) {
    validate();
  }

  const std::vector<SourceId>& sources() const noexcept { return sources_; }
  const std::map<std::string, CoverageRecord>& records() const noexcept { return records_; }

  const CoverageRecord* find(const std::string& wals_code) const {
    auto it = records_.find(wals_code);
    return it == records_.end() ? nullptr : &it->second;
  }

  // Checks every id in `selected` against the table; empty means all sources.
  std::vector<SourceId> resolve(std::span<const SourceId> selected) const {
    if (selected.empty()) return sources_;
    for (const auto& s : selected)
      if (std::find(sources_.begin(), sources_.end(), s) == sources_.end())
        throw std::invalid_argument("unknown source id `" + s + "`");
    return {selected.begin(), selected.end()};
  }

  std::uint64_t aggregate(const CoverageRecord& record, std::span<const SourceId> selected) const {
    return aggregate_entity_count(record, resolve(selected));
  }

  bool in_lod(const CoverageRecord& r, std::span<const SourceId> selected) const { return aggregate(r, selected) > 0; }
  static bool in_txt(const CoverageRecord& r) { return r.article_count.value_or(0) > 0; }
  bool in_lstar(const CoverageRecord& r, std::span<const SourceId> selected) const {
    return in_lod(r, selected) && in_txt(r);
  }

  std::set<std::string> lod_set(std::span<const SourceId> selected = {}) const {
    auto sel = resolve(selected);
    std::set<std::string> out;
    for (const auto& [code, r] : records_)
      if (aggregate_entity_count(r, sel) > 0) out.insert(code);
    return out;
  }
  std::set<std::string> txt_set() const {
    std::set<std::string> out;
    for (const auto& [code, r] : records_)
      if (in_txt(r)) out.insert(code);
    return out;
  }
  std::set<std::string> lstar_set(std::span<const SourceId> selected = {}) const {
    auto lod = lod_set(selected);
    auto txt = txt_set();
    std::set<std::string> out;
    std::set_intersection(lod.begin(), lod.end(), txt.begin(), txt.end(), std::inserter(out, out.end()));
    return out;
  }

  friend bool operator==(const CoverageTable&, const CoverageTable&) = default;

 private:
  std::vector<SourceId> sources_;
  std::map<std::string, CoverageRecord> records_;

  void validate() const {
    std::set<SourceId> known;
    for (const auto& s : sources_) {
      if (s.empty()) throw DataError("empty source id");
      if (!known.insert(s).second) throw DataError("duplicate source id `" + s + "`");
    }
    for (const auto& [code, r] : records_) {
      if (code != r.languoid.wals_code) throw DataError("record key mismatch for `" + code + "`");
      for (const auto& [s, n] : r.entity_counts)
        if (!known.contains(s)) throw DataError("record `" + code + "` references unknown source `" + s + "`");
    }
  }
};

// One record per WALS languoid; languoids without any input keep empty counts
// and feed the Missing category.
inline CoverageTable build_coverage_table(const std::map<SourceId, std::map<std::string, std::uint64_t>>& per_source,
                                          const std::map<std::string, std::uint64_t>& article_counts,
                                          const WalsIndex& wals) {
  std::map<std::string, CoverageRecord> records;
  for (const auto& l : wals.all) records.emplace(l.wals_code, CoverageRecord{l, {}, std::nullopt});

  auto record_for = [&](const std::string& code) -> CoverageRecord& {
    auto it = records.find(code);
    if (it == records.end()) throw DataError("languoid `" + code + "` is not in the WALS index");
    return it->second;
  };
  std::vector<SourceId> sources;
  for (const auto& [source, counts] : per_source) {
    sources.push_back(source);
    for (const auto& [code, n] : counts) record_for(code).entity_counts[source] += n;
  }
  for (const auto& [code, n] : article_counts) record_for(code).article_count = n;
  return CoverageTable(std::move(sources), std::move(records));
}

// Aligned D_E / D_W over L*, ascending wals_code.
inline Distributions distributions(const CoverageTable& table, std::span<const SourceId> selected = {}) {
  auto sel = table.resolve(selected);
  Distributions d;
  for (const auto& [code, r] : table.records()) {
    const auto e = aggregate_entity_count(r, sel);
    if (e == 0 || !CoverageTable::in_txt(r)) continue;
    d.langs.push_back(code);
    d.entity.push_back(e);
    d.article.push_back(*r.article_count);
  }
  return d;
}

// ---- JSON ---------------------------------------------------------------

inline nlohmann::json to_json(const CoverageTable& t) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& [code, r] : t.records()) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [s, n] : r.entity_counts) counts[s] = n;
    records.push_back({{"wals_code", code},
                       {"name", r.languoid.name},
                       {"iso639_3", r.languoid.iso639_3 ? nlohmann::json(*r.languoid.iso639_3) : nlohmann::json()},
                       {"written", r.languoid.is_written},
                       {"entity_counts", std::move(counts)},
                       {"article_count", r.article_count ? nlohmann::json(*r.article_count) : nlohmann::json()}});
  }
  return {{"sources", t.sources()}, {"records", std::move(records)}};
}

inline CoverageTable coverage_from_json(const nlohmann::json& j) {
  auto count = [](const nlohmann::json& v, const std::string& what) -> std::uint64_t {
    if (!v.is_number_unsigned()) throw DataError(what + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  };
  try {
    std::vector<SourceId> sources = j.at("sources").get<std::vector<SourceId>>();
    std::map<std::string, CoverageRecord> records;
    for (const auto& jr : j.at("records")) {
      CoverageRecord r;
      r.languoid.wals_code = jr.at("wals_code").get<std::string>();
      r.languoid.name = jr.at("name").get<std::string>();
      if (auto it = jr.find("iso639_3"); it != jr.end() && !it->is_null()) r.languoid.iso639_3 = it->get<std::string>();
      if (auto it = jr.find("written"); it != jr.end()) r.languoid.is_written = it->get<bool>();
      for (const auto& [s, n] : jr.at("entity_counts").items())
        r.entity_counts[s] = count(n, r.languoid.wals_code + "." + s);
      if (const auto& a = jr.at("article_count"); !a.is_null()) r.article_count = count(a, r.languoid.wals_code);
      auto code = r.languoid.wals_code;
      if (!records.emplace(code, std::move(r)).second) throw DataError("duplicate record `" + code + "`");
    }
    return CoverageTable(std::move(sources), std::move(records));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed coverage JSON: ") + e.what());
  }
}

inline void save_coverage(const CoverageTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + path);
  out << to_json(t).dump(2) << '\n';
}

inline CoverageTable load_coverage(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return coverage_from_json(j);
}

}  // namespace lodcov
