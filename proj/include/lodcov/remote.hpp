#pragma once

// Data acquisition: Wikipedia article counts (MediaWiki siteinfo statistics),
// per-language entity counts from SPARQL endpoints, and the offline CSV
// equivalents of both.
//
// HTTP goes through the Transport interface so every client can run against
// recorded responses. The article count is the `articles` statistic (content
// pages), not `pages`.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lodcov/csv.hpp"
#include "lodcov/langcodes.hpp"

namespace lodcov {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kUserAgentEnv = "LODCOV_USER_AGENT";
inline constexpr const char* kArticleStatistic = "articles";

inline std::string user_agent() {
  if (const char* ua = std::getenv(kUserAgentEnv); ua && *ua) return ua;
  return std::string("lodcov/") + kToolVersion + " (LOD language coverage statistics)";
}

// ---- transport ----------------------------------------------------------

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::map<std::string, std::string> headers;
  std::string body;
  std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class TransportError : public std::runtime_error {
 public:
  enum class Kind { timeout, connection };
  TransportError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// Injectable time source; tests swap in a virtual clock.
struct Clock {
  using time_point = std::chrono::steady_clock::time_point;
  std::function<time_point()> now = [] { return std::chrono::steady_clock::now(); };
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

// Spaces request starts at least `delay` apart across all callers.
class PolitenessGate {
 public:
  PolitenessGate(std::chrono::milliseconds delay, Clock clock) : delay_(delay), clock_(std::move(clock)) {}

  void wait() {
    std::unique_lock lock(mu_);
    if (delay_.count() <= 0) return;
    auto now = clock_.now();
    if (started_ && now < next_) {
      clock_.sleep(std::chrono::duration_cast<std::chrono::milliseconds>(next_ - now));
      now = clock_.now();
    }
    started_ = true;
    next_ = std::max(now, next_) + delay_;
  }

 private:
  std::mutex mu_;
  std::chrono::milliseconds delay_;
  Clock clock_;
  bool started_ = false;
  Clock::time_point next_{};
};

inline std::string url_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

// Runs fn(i) for i in [0, n) on at most `workers` threads.
template <typename Fn>
void for_each_bounded(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

// ---- Wikipedia ----------------------------------------------------------

struct WikiEdition {
  std::string edition_code;
  std::string api_url;  // e.g. https://fr.wikipedia.org/w/api.php
};

inline std::string default_api_url(const std::string& edition) {
  return "https://" + edition + ".wikipedia.org/w/api.php";
}

struct WikiFetchOptions {
  std::chrono::milliseconds timeout{30000};
  std::size_t max_concurrent = 4;
  std::chrono::milliseconds politeness_delay{0};
  Clock clock{};
};

struct WikiFetchResult {
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, std::string> errors;  // edition -> reason
};

inline std::string siteinfo_url(const WikiEdition& e) {
  return e.api_url + (e.api_url.find('?') == std::string::npos ? "?" : "&") +
         "action=query&meta=siteinfo&siprop=statistics&format=json";
}

// Extracts query.statistics.articles from a siteinfo response body.
inline std::uint64_t parse_siteinfo_articles(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  const nlohmann::json* v = nullptr;
  if (j.is_object() && j.contains("query") && j["query"].is_object() && j["query"].contains("statistics") &&
      j["query"]["statistics"].is_object() && j["query"]["statistics"].contains("articles"))
    v = &j["query"]["statistics"]["articles"];
  if (!v) throw DataError("response has no query.statistics.articles field");
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_string()) return csv::parse_count(v->get<std::string>(), "articles");
  throw DataError("articles field is not a non-negative integer");
}

// Failures are recorded per edition and never discard sibling results.
inline WikiFetchResult fetch_wikipedia_article_counts(const std::vector<WikiEdition>& editions, Transport& transport,
                                                      const WikiFetchOptions& opts = {}) {
  WikiFetchResult result;
  std::mutex mu;
  PolitenessGate gate(opts.politeness_delay, opts.clock);
  const std::string ua = user_agent();
  for_each_bounded(editions.size(), opts.max_concurrent, [&](std::size_t i) {
    const auto& e = editions[i];
    std::string error;
    std::uint64_t n = 0;
    try {
      if (e.edition_code.empty()) throw DataError("empty edition code");
      HttpRequest req;
      req.url = siteinfo_url(e);
      req.headers = {{"User-Agent", ua}, {"Accept", "application/json"}};
      req.timeout = opts.timeout;
      gate.wait();
      auto resp = transport.send(req);
      if (resp.status < 200 || resp.status >= 300) throw DataError("HTTP status " + std::to_string(resp.status));
      n = parse_siteinfo_articles(resp.body);
    } catch (const std::exception& ex) {
      error = ex.what();
    }
    std::lock_guard lock(mu);
    if (error.empty())
      result.counts[e.edition_code] = n;
    else
      result.errors[e.edition_code] = error;
  });
  return result;
}

// ---- SPARQL -------------------------------------------------------------

struct SparqlEndpointConfig {
  std::string endpoint_url;
  std::chrono::seconds timeout{60};
  int max_concurrent = 2;
  int retry_budget = 3;
  std::chrono::milliseconds politeness_delay{1000};
  std::chrono::milliseconds backoff_base{500};

  void validate() const {
    if (endpoint_url.empty()) throw std::invalid_argument("SPARQL endpoint URL is empty");
    if (max_concurrent < 1) throw std::invalid_argument("max_concurrent must be >= 1");
    if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
    if (retry_budget < 0) throw std::invalid_argument("retry_budget must be >= 0");
  }
};

class SparqlError : public std::runtime_error {
 public:
  enum class Kind { timeout, http, malformed, bad_template };
  SparqlError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Parses a SPARQL results document holding exactly one row with one integer
// binding.
inline std::uint64_t parse_single_count(const std::string& body) {
  auto malformed = [](const std::string& why) { return SparqlError(SparqlError::Kind::malformed, why); };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw malformed(std::string("results are not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("results") || !j["results"].is_object() ||
      !j["results"].contains("bindings") || !j["results"]["bindings"].is_array())
    throw malformed("missing results.bindings");
  const auto& rows = j["results"]["bindings"];
  if (rows.size() != 1) throw malformed("expected exactly one result row, got " + std::to_string(rows.size()));
  const auto& row = rows[0];
  if (!row.is_object() || row.size() != 1) throw malformed("expected exactly one variable in the result row");
  const auto& cell = row.begin().value();
  const nlohmann::json& v = (cell.is_object() && cell.contains("value")) ? cell["value"] : cell;
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    try {
      return csv::parse_count(v.get<std::string>(), "count binding");
    } catch (const DataError& e) {
      throw malformed(e.what());
    }
  }
  throw malformed("count binding is not a non-negative integer");
}

inline std::string instantiate_query(const std::string& query_template, const LanguageTag& tag) {
  static constexpr std::string_view placeholder = "{lang}";
  if (query_template.find(placeholder) == std::string::npos)
    throw SparqlError(SparqlError::Kind::bad_template, "query template lacks a {lang} placeholder");
  for (char c : tag.canonical)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-'))
      throw SparqlError(SparqlError::Kind::bad_template, "refusing to substitute tag `" + tag.canonical + "`");
  std::string q = query_template;
  for (auto pos = q.find(placeholder); pos != std::string::npos; pos = q.find(placeholder, pos + tag.canonical.size()))
    q.replace(pos, placeholder.size(), tag.canonical);
  return q;
}

struct SparqlBatchResult {
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, std::string> errors;
};

// Thread-safe client for one endpoint. The politeness delay is shared by all
// threads using the client.
class SparqlClient {
 public:
  SparqlClient(SparqlEndpointConfig cfg, Transport& transport, Clock clock = {})
      : cfg_(std::move(cfg)), transport_(transport), clock_(clock), gate_(cfg_.politeness_delay, clock) {
    cfg_.validate();
  }

  const SparqlEndpointConfig& config() const noexcept { return cfg_; }
  int retries_used() const noexcept { return retries_.load(); }

  std::uint64_t count(const std::string& query_template, const LanguageTag& tag) {
    HttpRequest req;
    req.method = "POST";
    req.url = cfg_.endpoint_url;
    req.headers = {{"User-Agent", user_agent()},
                   {"Accept", "application/sparql-results+json"},
                   {"Content-Type", "application/x-www-form-urlencoded"}};
    req.body = "query=" + url_encode(instantiate_query(query_template, tag));
    req.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(cfg_.timeout);

    for (int attempt = 0;; ++attempt) {
      std::string failure;
      SparqlError::Kind kind = SparqlError::Kind::timeout;
      try {
        gate_.wait();
        auto resp = transport_.send(req);
        if (resp.status >= 200 && resp.status < 300) return parse_single_count(resp.body);
        failure = "HTTP status " + std::to_string(resp.status);
        kind = SparqlError::Kind::http;
        if (resp.status != 429 && resp.status < 500) throw SparqlError(kind, failure);
      } catch (const TransportError& e) {
        failure = e.what();
        kind = e.kind() == TransportError::Kind::timeout ? SparqlError::Kind::timeout : SparqlError::Kind::http;
      }
      if (attempt >= cfg_.retry_budget)
        throw SparqlError(kind, failure + " (after " + std::to_string(attempt) + " retries)");
      ++retries_;
      clock_.sleep(cfg_.backoff_base * (1LL << std::min(attempt, 20)));
    }
  }

  SparqlBatchResult count_many(const std::string& query_template, const std::vector<LanguageTag>& tags) {
    SparqlBatchResult out;
    std::mutex mu;
    for_each_bounded(tags.size(), static_cast<std::size_t>(cfg_.max_concurrent), [&](std::size_t i) {
      try {
        auto n = count(query_template, tags[i]);
        std::lock_guard lock(mu);
        out.counts[tags[i].canonical] = n;
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        out.errors[tags[i].canonical] = e.what();
      }
    });
    return out;
  }

 private:
  SparqlEndpointConfig cfg_;
  Transport& transport_;
  Clock clock_;
  PolitenessGate gate_;
  std::atomic<int> retries_{0};
};

inline std::uint64_t fetch_sparql_language_count(const SparqlEndpointConfig& cfg, Transport& transport,
                                                 const std::string& query_template, const LanguageTag& tag,
                                                 Clock clock = {}) {
  return SparqlClient(cfg, transport, std::move(clock)).count(query_template, tag);
}

// ---- CSV inputs and outputs ----------------------------------------------

struct CountRow {
  std::string source;
  std::string language_tag;
  std::uint64_t count = 0;
  friend bool operator==(const CountRow&, const CountRow&) = default;
};

inline const std::vector<std::string> kCountsHeader = {"source", "language_tag", "entity_count"};
inline const std::vector<std::string> kArticlesHeader = {"edition", "articles"};

inline std::vector<CountRow> load_counts_csv(const std::string& path) {
  auto t = csv::read_file(path);
  csv::require_header(t, kCountsHeader, path);
  std::vector<CountRow> rows;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto where = path + ":" + std::to_string(t.line_numbers[r]);
    const auto& f = t.rows[r];
    if (f[0].empty()) throw DataError(where + ": empty source");
    if (f[1].empty()) throw DataError(where + ": empty language tag");
    CountRow row{f[0], normalize_tag(f[1]).canonical, csv::parse_count(f[2], where)};
    if (!seen.emplace(row.source, row.language_tag).second)
      throw DataError(where + ": duplicate (source, language_tag) = (" + row.source + ", " + row.language_tag + ")");
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::map<std::string, std::uint64_t> load_article_counts_csv(const std::string& path) {
  auto t = csv::read_file(path);
  csv::require_header(t, kArticlesHeader, path);
  std::map<std::string, std::uint64_t> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto where = path + ":" + std::to_string(t.line_numbers[r]);
    if (t.rows[r][0].empty()) throw DataError(where + ": empty edition code");
    auto edition = normalize_tag(t.rows[r][0]).canonical;
    if (!out.emplace(edition, csv::parse_count(t.rows[r][1], where)).second)
      throw DataError(where + ": duplicate edition `" + edition + "`");
  }
  return out;
}

inline void write_counts_csv(std::ostream& os, const std::vector<CountRow>& rows) {
  csv::write_record(os, kCountsHeader);
  for (const auto& r : rows) csv::write_record(os, {r.source, r.language_tag, std::to_string(r.count)});
}

inline void write_article_counts_csv(std::ostream& os, const std::map<std::string, std::uint64_t>& counts) {
  csv::write_record(os, kArticlesHeader);
  for (const auto& [e, n] : counts) csv::write_record(os, {e, std::to_string(n)});
}

}  // namespace lodcov
