#pragma once

// Run configuration: a plain-text `key = value` file. `#` starts a comment
// line; blank lines are ignored; relative paths resolve against the config
// file's directory. Keys:
//
//   source.<name>.dump        N-Triples file(s), comma separated (gzip ok)
//   source.<name>.counts      counts CSV (source,language_tag,entity_count)
//   source.<name>.sparql      SPARQL endpoint URL
//   source.<name>.query       query template with a {lang} placeholder
//   source.<name>.tags        comma separated tags to query
//   source.<name>.predicates  `any` or whitespace/comma separated IRIs
//   articles.csv              article counts CSV (edition,articles)
//   wiki.editions             comma separated edition codes for fetch-wiki
//   wiki.api                  API URL template, {edition} placeholder
//   wiki.max_concurrent, wiki.politeness_ms, wiki.timeout_s
//   wals.languoids            WALS languoid CSV
//   wals.written              writtenness companion CSV (wals_code column)
//   wals.written_filter       true|false (default true)
//   bridge.iso                ISO 639-1 -> 639-3 CSV (iso1,iso3)
//   bridge.editions           irregular code overrides (edition,iso3)
//   count.mode                exact|approximate
//   count.precision           sketch precision p (default 14)
//   count.strict              true|false
//   count.threads             worker threads for multi-file dumps
//   sparql.timeout_s, sparql.max_concurrent, sparql.retry_budget, sparql.politeness_ms
//   analysis.k, analysis.seed, analysis.tol, analysis.max_iter, analysis.restarts,
//   analysis.tau, analysis.features (log|raw), analysis.reference (wals_code,label CSV)
//   output.dir

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lodcov/categorize.hpp"
#include "lodcov/ingest.hpp"
#include "lodcov/kmeans.hpp"
#include "lodcov/remote.hpp"

namespace lodcov {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SourceKind { dump, counts, sparql };

struct SourceConfig {
  std::string name;
  SourceKind kind = SourceKind::counts;
  std::vector<std::string> dumps;
  std::optional<std::string> counts_csv;
  std::string sparql_endpoint;
  std::string sparql_query;
  std::vector<std::string> sparql_tags;
  PredicateFilter predicates = PredicateFilter::labels();
};

struct AnalysisParams {
  KMeansParams kmeans{};
  double tau = kDefaultTau;
  FeatureTransform features = FeatureTransform::log10p1;
  std::optional<std::string> reference_labels;
};

struct RunConfig {
  std::vector<SourceConfig> sources;  // ascending name
  std::optional<std::string> articles_csv;
  std::vector<std::string> wiki_editions;
  std::string wiki_api_template = "https://{edition}.wikipedia.org/w/api.php";
  WikiFetchOptions wiki{};
  std::string wals_languoids;
  std::optional<std::string> wals_written;
  bool written_filter = true;
  std::string iso_bridge;
  std::optional<std::string> edition_overrides;
  CountMode count_mode = CountMode::exact;
  int precision = HyperLogLog::kDefaultPrecision;
  bool strict = false;
  std::size_t threads = 1;
  SparqlEndpointConfig sparql{};
  AnalysisParams analysis{};
  std::string output_dir = "out";
  // Raw entries in file order, echoed into report metadata.
  std::vector<std::pair<std::string, std::string>> echo;

  void validate() const {
    if (sources.empty()) throw ConfigError("config: at least one KG source (source.<name>.*) is required");
    if (!articles_csv && wiki_editions.empty())
      throw ConfigError("config: an article source (articles.csv or wiki.editions) is required");
    if (wals_languoids.empty()) throw ConfigError("config: wals.languoids is required");
    if (iso_bridge.empty()) throw ConfigError("config: bridge.iso is required");
    if (analysis.kmeans.k < 1) throw ConfigError("config: analysis.k must be >= 1");
    if (!(analysis.tau > 0)) throw ConfigError("config: analysis.tau must be > 0");
    if (!(analysis.kmeans.tol > 0)) throw ConfigError("config: analysis.tol must be > 0");
    if (analysis.kmeans.max_iter < 1) throw ConfigError("config: analysis.max_iter must be >= 1");
    if (analysis.kmeans.restarts < 1) throw ConfigError("config: analysis.restarts must be >= 1");
    if (precision < HyperLogLog::kMinPrecision || precision > HyperLogLog::kMaxPrecision)
      throw ConfigError("config: count.precision must be in [4, 18]");
    if (threads < 1) throw ConfigError("config: count.threads must be >= 1");
  }

  std::string wiki_api_url(const std::string& edition) const {
    std::string url = wiki_api_template;
    const std::string ph = "{edition}";
    for (auto pos = url.find(ph); pos != std::string::npos; pos = url.find(ph, pos + edition.size()))
      url.replace(pos, ph.size(), edition);
    return url;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s, std::string_view seps = ",") {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string_view::npos) {
      if (auto t = trim(cur); !t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (auto t = trim(cur); !t.empty()) out.push_back(t);
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config: `" + key + "` expects a number, got `" + v + "`");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: `" + key + "` expects true/false, got `" + v + "`");
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& what) {
  RunConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return (path.is_absolute() ? path : base_dir / path).lexically_normal().string();
  };
  std::map<std::string, SourceConfig> sources;
  std::map<std::string, std::set<std::string>> source_keys;

  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  cfg.output_dir = resolve("out");
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(what + ":" + std::to_string(lineno) + ": expected `key = value`");
    const auto key = detail::trim(std::string_view(t).substr(0, eq));
    const auto value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError(what + ":" + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(what + ":" + std::to_string(lineno) + ": duplicate key `" + key + "`");
    cfg.echo.emplace_back(key, value);

    if (key.rfind("source.", 0) == 0) {
      auto dot = key.rfind('.');
      const auto name = key.substr(7, dot - 7);
      const auto field = key.substr(dot + 1);
      if (dot <= 7 || name.empty()) throw ConfigError(what + ":" + std::to_string(lineno) + ": bad source key `" + key + "`");
      auto& s = sources[name];
      s.name = name;
      source_keys[name].insert(field);
      if (field == "dump") {
        for (const auto& p : detail::split_list(value)) s.dumps.push_back(resolve(p));
      } else if (field == "counts") {
        s.counts_csv = resolve(value);
      } else if (field == "sparql") {
        s.sparql_endpoint = value;
      } else if (field == "query") {
        s.sparql_query = value;
      } else if (field == "tags") {
        s.sparql_tags = detail::split_list(value);
      } else if (field == "predicates") {
        if (value == "any") {
          s.predicates = PredicateFilter::any();
        } else {
          auto iris = detail::split_list(value, ", \t");
          if (iris.empty()) throw ConfigError("config: `" + key + "` is empty");
          s.predicates = PredicateFilter({iris.begin(), iris.end()});
        }
      } else {
        throw ConfigError(what + ":" + std::to_string(lineno) + ": unknown source field `" + field + "`");
      }
      continue;
    }

    if (key == "articles.csv") cfg.articles_csv = resolve(value);
    else if (key == "wiki.editions") cfg.wiki_editions = detail::split_list(value);
    else if (key == "wiki.api") cfg.wiki_api_template = value;
    else if (key == "wiki.max_concurrent") cfg.wiki.max_concurrent = detail::parse_number<std::size_t>(key, value);
    else if (key == "wiki.politeness_ms") cfg.wiki.politeness_delay = std::chrono::milliseconds(detail::parse_number<long>(key, value));
    else if (key == "wiki.timeout_s") cfg.wiki.timeout = std::chrono::seconds(detail::parse_number<long>(key, value));
    else if (key == "wals.languoids") cfg.wals_languoids = resolve(value);
    else if (key == "wals.written") cfg.wals_written = resolve(value);
    else if (key == "wals.written_filter") cfg.written_filter = detail::parse_bool(key, value);
    else if (key == "bridge.iso") cfg.iso_bridge = resolve(value);
    else if (key == "bridge.editions") cfg.edition_overrides = resolve(value);
    else if (key == "count.mode") {
      if (value == "exact") cfg.count_mode = CountMode::exact;
      else if (value == "approximate") cfg.count_mode = CountMode::approximate;
      else throw ConfigError("config: count.mode must be exact or approximate");
    }
    else if (key == "count.precision") cfg.precision = detail::parse_number<int>(key, value);
    else if (key == "count.strict") cfg.strict = detail::parse_bool(key, value);
    else if (key == "count.threads") cfg.threads = detail::parse_number<std::size_t>(key, value);
    else if (key == "sparql.timeout_s") cfg.sparql.timeout = std::chrono::seconds(detail::parse_number<long>(key, value));
    else if (key == "sparql.max_concurrent") cfg.sparql.max_concurrent = detail::parse_number<int>(key, value);
    else if (key == "sparql.retry_budget") cfg.sparql.retry_budget = detail::parse_number<int>(key, value);
    else if (key == "sparql.politeness_ms") cfg.sparql.politeness_delay = std::chrono::milliseconds(detail::parse_number<long>(key, value));
    else if (key == "analysis.k") cfg.analysis.kmeans.k = detail::parse_number<int>(key, value);
    else if (key == "analysis.seed") cfg.analysis.kmeans.seed = detail::parse_number<std::uint64_t>(key, value);
    else if (key == "analysis.tol") cfg.analysis.kmeans.tol = detail::parse_number<double>(key, value);
    else if (key == "analysis.max_iter") cfg.analysis.kmeans.max_iter = detail::parse_number<int>(key, value);
    else if (key == "analysis.restarts") cfg.analysis.kmeans.restarts = detail::parse_number<int>(key, value);
    else if (key == "analysis.tau") cfg.analysis.tau = detail::parse_number<double>(key, value);
    else if (key == "analysis.features") {
      if (value == "log") cfg.analysis.features = FeatureTransform::log10p1;
      else if (value == "raw") cfg.analysis.features = FeatureTransform::raw;
      else throw ConfigError("config: analysis.features must be log or raw");
    }
    else if (key == "analysis.reference") cfg.analysis.reference_labels = resolve(value);
    else if (key == "output.dir") cfg.output_dir = resolve(value);
    else throw ConfigError(what + ":" + std::to_string(lineno) + ": unknown key `" + key + "`");
  }

  for (auto& [name, s] : sources) {
    const auto& keys = source_keys[name];
    const int kinds = int(keys.contains("dump")) + int(keys.contains("counts")) + int(keys.contains("sparql"));
    if (kinds != 1)
      throw ConfigError("config: source `" + name + "` needs exactly one of dump, counts, sparql");
    if (keys.contains("dump")) {
      s.kind = SourceKind::dump;
      if (s.dumps.empty()) throw ConfigError("config: source `" + name + "` has an empty dump list");
    } else if (keys.contains("sparql")) {
      s.kind = SourceKind::sparql;
      if (s.sparql_query.empty()) throw ConfigError("config: source `" + name + "` needs a query template");
    } else {
      s.kind = SourceKind::counts;
    }
    cfg.sources.push_back(std::move(s));
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  auto base = std::filesystem::absolute(path).parent_path();
  auto cfg = parse_config(in, base, path);
  cfg.validate();
  return cfg;
}

}  // namespace lodcov
