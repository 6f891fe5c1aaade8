#pragma once

// Per-language-tag distinct entity counting over N-Triples streams.
//
// An entity is a distinct subject term (IRI or blank node) carrying at least
// one language-tagged literal through an accepted predicate. Counting is
// single-writer; parallel runs shard the input into independent accumulators
// and merge them afterwards.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <variant>
#include <vector>

#include "lodcov/hyperloglog.hpp"
#include "lodcov/line_reader.hpp"
#include "lodcov/ntriples.hpp"

namespace lodcov {

inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kSkosPrefLabel = "http://www.w3.org/2004/02/skos/core#prefLabel";
inline constexpr std::string_view kSkosAltLabel = "http://www.w3.org/2004/02/skos/core#altLabel";

class PredicateFilter {
 public:
  static PredicateFilter any() {
    PredicateFilter f;
    f.any_ = true;
    return f;
  }
  static PredicateFilter labels() {
    return PredicateFilter({std::string(kRdfsLabel), std::string(kSkosPrefLabel), std::string(kSkosAltLabel)});
  }

  PredicateFilter() = default;
  explicit PredicateFilter(std::unordered_set<std::string> iris) : iris_(std::move(iris)) {}

  bool accepts(const std::string& predicate) const { return any_ || iris_.contains(predicate); }
  bool is_any() const noexcept { return any_; }
  const std::unordered_set<std::string>& iris() const noexcept { return iris_; }

 private:
  bool any_ = false;
  std::unordered_set<std::string> iris_;
};

enum class CountMode { exact, approximate };

inline const char* to_string(CountMode m) { return m == CountMode::exact ? "exact" : "approximate"; }

struct CountOptions {
  PredicateFilter filter = PredicateFilter::labels();
  bool strict = false;
};

class CountAccumulator {
 public:
  static constexpr std::size_t kMaxErrorSamples = 20;

  explicit CountAccumulator(CountMode mode = CountMode::exact,
                            int precision = HyperLogLog::kDefaultPrecision)
      : mode_(mode), precision_(precision) {
    if (mode == CountMode::approximate) (void)HyperLogLog{precision};  // validates precision
  }

  CountMode mode() const noexcept { return mode_; }
  int precision() const noexcept { return precision_; }

  std::uint64_t lines_consumed() const noexcept { return lines_; }
  std::uint64_t triples_seen() const noexcept { return triples_; }
  std::uint64_t parse_errors() const noexcept { return errors_; }
  std::uint64_t skipped_lines() const noexcept { return skipped_; }
  const std::vector<std::string>& error_samples() const noexcept { return error_samples_; }

  std::size_t tag_count() const noexcept { return per_tag_.size(); }

  void add(const std::string& tag, std::string_view subject_key) {
    auto it = per_tag_.find(tag);
    if (it == per_tag_.end()) it = per_tag_.emplace(tag, make_tracker()).first;
    if (auto* set = std::get_if<ExactSet>(&it->second))
      set->emplace(subject_key);
    else
      std::get<HyperLogLog>(it->second).add(subject_key);
  }

  // Feeds one physical line. Parse failures throw in strict mode, otherwise
  // they are counted and skipped.
  void consume_line(std::string_view line, const CountOptions& opts) {
    ++lines_;
    std::optional<Triple> t;
    try {
      t = parse_ntriples_line(line);
    } catch (const ParseError& e) {
      if (opts.strict) throw e.at_line(lines_);
      ++errors_;
      if (error_samples_.size() < kMaxErrorSamples) error_samples_.push_back(e.at_line(lines_).what());
      return;
    }
    if (!t) {
      ++skipped_;
      return;
    }
    ++triples_;
    const Literal* lit = t->literal();
    if (!lit || !lit->language_tag || !opts.filter.accepts(t->predicate)) return;
    add(*lit->language_tag, t->subject.key());
  }

  void merge(const CountAccumulator& other) {
    if (other.mode_ != mode_) throw std::invalid_argument("cannot merge exact and approximate accumulators");
    if (mode_ == CountMode::approximate && other.precision_ != precision_)
      throw std::invalid_argument("cannot merge sketches with different precision");
    for (const auto& [tag, tracker] : other.per_tag_) {
      auto it = per_tag_.find(tag);
      if (it == per_tag_.end()) {
        per_tag_.emplace(tag, tracker);
        continue;
      }
      if (auto* set = std::get_if<ExactSet>(&it->second)) {
        const auto& theirs = std::get<ExactSet>(tracker);
        set->insert(theirs.begin(), theirs.end());
      } else {
        std::get<HyperLogLog>(it->second).merge(std::get<HyperLogLog>(tracker));
      }
    }
    lines_ += other.lines_;
    triples_ += other.triples_;
    errors_ += other.errors_;
    skipped_ += other.skipped_;
    for (const auto& s : other.error_samples_) {
      if (error_samples_.size() >= kMaxErrorSamples) break;
      error_samples_.push_back(s);
    }
  }

  // Exact distinct counts, or rounded sketch estimates in approximate mode.
  std::map<std::string, std::uint64_t> report() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [tag, tracker] : per_tag_) {
      if (const auto* set = std::get_if<ExactSet>(&tracker))
        out.emplace(tag, set->size());
      else
        out.emplace(tag, static_cast<std::uint64_t>(std::llround(std::get<HyperLogLog>(tracker).estimate())));
    }
    return out;
  }

  // Sketch for `tag` in approximate mode, nullptr otherwise.
  const HyperLogLog* sketch(const std::string& tag) const {
    auto it = per_tag_.find(tag);
    return it == per_tag_.end() ? nullptr : std::get_if<HyperLogLog>(&it->second);
  }

 private:
  using ExactSet = std::unordered_set<std::string>;
  using Tracker = std::variant<ExactSet, HyperLogLog>;

  Tracker make_tracker() const {
    if (mode_ == CountMode::exact) return ExactSet{};
    return HyperLogLog{precision_};
  }

  CountMode mode_;
  int precision_;
  std::map<std::string, Tracker> per_tag_;
  std::uint64_t lines_ = 0;
  std::uint64_t triples_ = 0;
  std::uint64_t errors_ = 0;
  std::uint64_t skipped_ = 0;
  std::vector<std::string> error_samples_;
};

template <typename R>
concept LineRange = std::ranges::input_range<R> &&
                    std::convertible_to<std::ranges::range_reference_t<R>, std::string_view>;

template <LineRange R>
CountAccumulator& count_entities(R&& lines, const CountOptions& opts, CountAccumulator& acc) {
  for (auto&& line : lines) acc.consume_line(std::string_view(line), opts);
  return acc;
}

inline CountAccumulator& count_entities(LineReader& reader, const CountOptions& opts, CountAccumulator& acc) {
  std::string line;
  while (reader.next(line)) acc.consume_line(line, opts);
  return acc;
}

inline CountAccumulator count_file(const std::string& path, const CountOptions& opts, CountMode mode,
                                   int precision = HyperLogLog::kDefaultPrecision) {
  CountAccumulator acc(mode, precision);
  LineReader reader(path);
  count_entities(reader, opts, acc);
  return acc;
}

inline CountAccumulator merge_accumulators(CountAccumulator a, const CountAccumulator& b) {
  a.merge(b);
  return a;
}

namespace detail {

// Runs `job(i)` for i in [0, n) on up to `threads` workers and merges the
// results in index order, so the outcome never depends on scheduling.
template <typename Job>
CountAccumulator run_sharded(std::size_t n, std::size_t threads, CountMode mode, int precision, Job job) {
  std::vector<CountAccumulator> parts(n, CountAccumulator(mode, precision));
  std::vector<std::exception_ptr> errors(n);
  threads = std::max<std::size_t>(1, std::min(threads, n));
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += threads) {
          try {
            job(i, parts[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  CountAccumulator total(mode, precision);
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

// Splits `lines` into `shards` contiguous ranges counted on separate threads.
inline CountAccumulator count_entities_sharded(std::span<const std::string> lines, std::size_t shards,
                                               const CountOptions& opts, CountMode mode,
                                               int precision = HyperLogLog::kDefaultPrecision) {
  shards = std::max<std::size_t>(1, shards);
  const std::size_t chunk = (lines.size() + shards - 1) / shards;
  return detail::run_sharded(shards, shards, mode, precision, [&](std::size_t i, CountAccumulator& acc) {
    const std::size_t begin = std::min(lines.size(), i * chunk);
    const std::size_t end = std::min(lines.size(), begin + chunk);
    count_entities(lines.subspan(begin, end - begin), opts, acc);
  });
}

// One accumulator per file, merged. Files are the natural shards of a dump.
inline CountAccumulator count_files(const std::vector<std::string>& paths, const CountOptions& opts,
                                    CountMode mode, int precision = HyperLogLog::kDefaultPrecision,
                                    std::size_t threads = 1) {
  return detail::run_sharded(paths.size(), threads, mode, precision, [&](std::size_t i, CountAccumulator& acc) {
    LineReader reader(paths[i]);
    count_entities(reader, opts, acc);
  });
}

}  // namespace lodcov
