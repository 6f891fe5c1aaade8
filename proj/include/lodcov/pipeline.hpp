#pragma once

// Pipeline stages behind the CLI verbs: count, fetch-wiki, build, analyze and
// report (all four chained). Each stage reads and writes files in the
// configured output directory and returns the warnings it raised; a stage
// with warnings completes in degraded mode.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lodcov/categorize.hpp"
#include "lodcov/config.hpp"
#include "lodcov/coverage.hpp"
#include "lodcov/csv.hpp"
#include "lodcov/ingest.hpp"
#include "lodcov/kmeans.hpp"
#include "lodcov/langcodes.hpp"
#include "lodcov/nmi.hpp"
#include "lodcov/quantile.hpp"
#include "lodcov/remote.hpp"

namespace lodcov {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitDegraded = 3 };

struct StageResult {
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;

  int exit_code() const { return warnings.empty() ? kExitOk : kExitDegraded; }
  void absorb(const StageResult& other) {
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    outputs.insert(outputs.end(), other.outputs.begin(), other.outputs.end());
  }
};

namespace paths {
inline std::string in_dir(const RunConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.output_dir) / file).string();
}
inline std::string counts(const RunConfig& cfg) { return in_dir(cfg, "counts.csv"); }
inline std::string articles(const RunConfig& cfg) { return in_dir(cfg, "articles.csv"); }
inline std::string article_errors(const RunConfig& cfg) { return in_dir(cfg, "articles_errors.csv"); }
inline std::string coverage(const RunConfig& cfg) { return in_dir(cfg, "coverage.json"); }
inline std::string unmapped_tags(const RunConfig& cfg) { return in_dir(cfg, "unmapped_tags.csv"); }
inline std::string unmapped_editions(const RunConfig& cfg) { return in_dir(cfg, "unmapped_editions.csv"); }
inline std::string report_json(const RunConfig& cfg) { return in_dir(cfg, "report.json"); }
inline std::string report_csv(const RunConfig& cfg) { return in_dir(cfg, "report.csv"); }
inline std::string scatter(const RunConfig& cfg) { return in_dir(cfg, "scatter.tsv"); }
}  // namespace paths

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + path);
  return out;
}

inline void write_tag_counts(const std::string& path, const std::map<std::string, std::uint64_t>& counts) {
  auto out = open_output(path);
  csv::write_record(out, {"language_tag", "count"});
  for (const auto& [tag, n] : counts) csv::write_record(out, {tag, std::to_string(n)});
}

}  // namespace detail

// ---- count --------------------------------------------------------------

// Counts dump and SPARQL sources into <out>/counts.csv. `transport` is only
// needed when a SPARQL source is configured.
inline StageResult cmd_count(const RunConfig& cfg, Transport* transport, std::ostream& log) {
  StageResult res;
  std::vector<CountRow> rows;
  for (const auto& s : cfg.sources) {
    if (s.kind == SourceKind::dump) {
      CountOptions opts{s.predicates, cfg.strict};
      auto acc = count_files(s.dumps, opts, cfg.count_mode, cfg.precision, cfg.threads);
      log << "count: " << s.name << ": " << acc.lines_consumed() << " lines, " << acc.triples_seen() << " triples, "
          << acc.parse_errors() << " parse errors, " << acc.tag_count() << " tags (" << to_string(cfg.count_mode)
          << ")\n";
      for (const auto& e : acc.error_samples()) log << "count: " << s.name << ": skipped: " << e << "\n";
      if (acc.parse_errors() > 0)
        res.warnings.push_back(s.name + ": " + std::to_string(acc.parse_errors()) + " malformed lines skipped");
      for (const auto& [tag, n] : acc.report()) rows.push_back({s.name, tag, n});
    } else if (s.kind == SourceKind::sparql) {
      if (!transport) throw ConfigError("source `" + s.name + "` needs network access (SPARQL)");
      auto endpoint = cfg.sparql;
      endpoint.endpoint_url = s.sparql_endpoint;
      SparqlClient client(endpoint, *transport);
      std::vector<LanguageTag> tags;
      for (const auto& t : s.sparql_tags) tags.push_back(normalize_tag(t));
      auto batch = client.count_many(s.sparql_query, tags);
      for (const auto& [tag, err] : batch.errors) res.warnings.push_back(s.name + ": SPARQL `" + tag + "`: " + err);
      for (const auto& [tag, n] : batch.counts) rows.push_back({s.name, tag, n});
      log << "count: " << s.name << ": " << batch.counts.size() << " tags fetched, " << batch.errors.size()
          << " failed\n";
    }
  }
  std::sort(rows.begin(), rows.end(), [](const CountRow& a, const CountRow& b) {
    return std::tie(a.source, a.language_tag) < std::tie(b.source, b.language_tag);
  });
  const auto path = paths::counts(cfg);
  auto out = detail::open_output(path);
  write_counts_csv(out, rows);
  res.outputs.push_back(path);
  return res;
}

// ---- fetch-wiki ---------------------------------------------------------

inline StageResult cmd_fetch_wiki(const RunConfig& cfg, Transport& transport, std::ostream& log) {
  StageResult res;
  std::vector<WikiEdition> editions;
  for (const auto& e : cfg.wiki_editions) editions.push_back({e, cfg.wiki_api_url(e)});
  auto fetched = fetch_wikipedia_article_counts(editions, transport, cfg.wiki);

  const auto path = paths::articles(cfg);
  {
    auto out = detail::open_output(path);
    write_article_counts_csv(out, fetched.counts);
  }
  const auto err_path = paths::article_errors(cfg);
  {
    auto out = detail::open_output(err_path);
    csv::write_record(out, {"edition", "error"});
    for (const auto& [e, why] : fetched.errors) csv::write_record(out, {e, why});
  }
  res.outputs = {path, err_path};
  log << "fetch-wiki: " << fetched.counts.size() << " editions fetched, " << fetched.errors.size() << " failed\n";
  if (!editions.empty() && fetched.counts.empty())
    throw DataError("fetch-wiki: every edition failed (see " + err_path + ")");
  for (const auto& [e, why] : fetched.errors) res.warnings.push_back("fetch-wiki: " + e + ": " + why);
  return res;
}

// ---- build --------------------------------------------------------------

struct BuildResult {
  CoverageTable table;
  std::map<std::string, std::uint64_t> unmapped_tags;
  std::map<std::string, std::uint64_t> unmapped_editions;
  StageResult stage;
};

inline BuildResult build_from_inputs(const RunConfig& cfg, std::ostream& log) {
  BuildResult br;
  auto wals = load_wals(cfg.wals_languoids, cfg.written_filter, cfg.wals_written);
  for (const auto& w : wals.warnings) br.stage.warnings.push_back("wals: " + w);
  auto bridge = load_bridge(cfg.iso_bridge, cfg.edition_overrides);

  std::map<std::string, std::vector<CountRow>> loaded;
  std::map<SourceId, std::map<std::string, std::uint64_t>> per_source;
  for (const auto& s : cfg.sources) {
    const auto path = s.counts_csv.value_or(paths::counts(cfg));
    auto it = loaded.find(path);
    if (it == loaded.end()) it = loaded.emplace(path, load_counts_csv(path)).first;
    std::map<std::string, std::uint64_t> tag_counts;
    for (const auto& r : it->second)
      if (r.source == s.name) tag_counts[r.language_tag] += r.count;
    if (tag_counts.empty()) br.stage.warnings.push_back("build: no counts for source `" + s.name + "` in " + path);
    auto folded = fold_counts_by_languoid(tag_counts, wals, bridge);
    per_source[s.name] = std::move(folded.mapped);
    for (const auto& [tag, n] : folded.unmapped) br.unmapped_tags[tag] += n;
  }

  const auto articles_path = cfg.articles_csv.value_or(paths::articles(cfg));
  auto editions = fold_counts_by_languoid(load_article_counts_csv(articles_path), wals, bridge);
  br.unmapped_editions = std::move(editions.unmapped);

  br.table = build_coverage_table(per_source, editions.mapped, wals);
  log << "build: " << br.table.records().size() << " languoids, |L_LOD| = " << br.table.lod_set().size()
      << ", |L_TXT| = " << br.table.txt_set().size() << ", |L*| = " << br.table.lstar_set().size() << ", "
      << br.unmapped_tags.size() << " unmapped tags, " << br.unmapped_editions.size() << " unmapped editions\n";
  return br;
}

inline BuildResult cmd_build(const RunConfig& cfg, std::ostream& log) {
  auto br = build_from_inputs(cfg, log);
  std::filesystem::create_directories(cfg.output_dir);
  save_coverage(br.table, paths::coverage(cfg));
  detail::write_tag_counts(paths::unmapped_tags(cfg), br.unmapped_tags);
  detail::write_tag_counts(paths::unmapped_editions(cfg), br.unmapped_editions);
  br.stage.outputs = {paths::coverage(cfg), paths::unmapped_tags(cfg), paths::unmapped_editions(cfg)};
  return br;
}

// ---- analyze ------------------------------------------------------------

struct ReportRow {
  std::string wals_code;
  std::string name;
  std::map<SourceId, std::uint64_t> entity_counts;
  std::uint64_t entity_total = 0;
  std::optional<std::uint64_t> article_count;
  bool in_lstar = false;
  std::optional<Point2> features;
  std::optional<int> cluster;
  std::optional<JoshiCategory> joshi;
  LodCategory category = LodCategory::missing;
  std::optional<DivergenceClass> divergence;
};

struct RunReport {
  std::vector<SourceId> sources;
  std::vector<ReportRow> rows;  // ascending wals_code, one per languoid
  std::size_t n_lod = 0;
  std::size_t n_txt = 0;
  std::size_t n_lstar = 0;
  std::optional<Quartiles> q_entity;
  std::optional<Quartiles> q_article;
  std::optional<ClusterModel> model;
  std::map<int, JoshiCategory> cluster_labels;
  std::map<LodCategory, std::size_t> histogram;
  std::optional<double> nmi_reference;
  std::size_t nmi_common = 0;
  std::vector<std::string> warnings;
};

inline std::map<std::string, std::string> load_reference_labels(const std::string& path) {
  auto t = csv::read_file(path);
  csv::require_header(t, {"wals_code", "label"}, path);
  std::map<std::string, std::string> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    if (!out.emplace(t.rows[r][0], t.rows[r][1]).second)
      throw DataError(path + ":" + std::to_string(t.line_numbers[r]) + ": duplicate wals_code `" + t.rows[r][0] + "`");
  return out;
}

// The analysis proper: features, clustering, Joshi labels, quartile
// categories, divergence and the optional reference NMI.
inline RunReport analyze(const CoverageTable& table, const AnalysisParams& params,
                         const std::map<std::string, std::string>* reference = nullptr) {
  RunReport rep;
  rep.sources = table.sources();
  const auto& sel = rep.sources;
  auto dist = distributions(table, sel);
  rep.n_lod = table.lod_set().size();
  rep.n_txt = table.txt_set().size();
  rep.n_lstar = dist.langs.size();

  if (!dist.langs.empty()) {
    rep.q_entity = quartiles(dist.entity);
    rep.q_article = quartiles(dist.article);
  } else {
    rep.warnings.push_back("L* is empty; every languoid is Missing");
  }

  std::vector<Point2> points;
  std::map<std::string, std::size_t> point_index;
  for (const auto& [code, r] : table.records()) {
    ReportRow row;
    row.wals_code = code;
    row.name = r.languoid.name;
    row.entity_counts = r.entity_counts;
    row.entity_total = aggregate_entity_count(r, sel);
    row.article_count = r.article_count;
    row.in_lstar = row.entity_total > 0 && CoverageTable::in_txt(r);
    if (row.in_lstar) {
      row.features = make_features(r, sel, params.features).p;
      row.divergence = divergence(log_features(r, sel), params.tau);
      point_index[code] = points.size();
      points.push_back(*row.features);
      row.category = lod_categorize(static_cast<double>(row.entity_total), static_cast<double>(*r.article_count),
                                    *rep.q_entity, *rep.q_article, true);
    }
    rep.rows.push_back(std::move(row));
  }

  if (!points.empty() && points.size() < static_cast<std::size_t>(params.kmeans.k)) {
    rep.warnings.push_back("clustering skipped: |L*| = " + std::to_string(points.size()) + " < k = " +
                           std::to_string(params.kmeans.k));
  } else if (!points.empty()) {
    rep.model = kmeans(points, params.kmeans);
    if (params.kmeans.k == 6)
      rep.cluster_labels = label_clusters(*rep.model);
    else
      rep.warnings.push_back("Joshi labels need k = 6; clusters left unlabeled");
    for (auto& row : rep.rows) {
      auto it = point_index.find(row.wals_code);
      if (it == point_index.end()) continue;
      row.cluster = rep.model->assignments[it->second];
      if (auto l = rep.cluster_labels.find(*row.cluster); l != rep.cluster_labels.end()) row.joshi = l->second;
    }
  }

  for (auto c : kLodCategories) rep.histogram[c] = 0;
  for (const auto& row : rep.rows) ++rep.histogram[row.category];

  if (reference) {
    std::map<std::string, std::string> ref, ours;
    for (const auto& row : rep.rows) {
      if (!row.cluster) continue;
      auto it = reference->find(row.wals_code);
      if (it == reference->end()) continue;
      ref[row.wals_code] = it->second;
      ours[row.wals_code] = row.joshi ? std::string(to_string(*row.joshi)) : std::to_string(*row.cluster);
    }
    rep.nmi_common = ref.size();
    if (ref.empty())
      rep.warnings.push_back("reference labels share no clustered languoid; NMI omitted");
    else
      rep.nmi_reference = nmi(ref, ours);
  }
  return rep;
}

inline nlohmann::json report_metadata(const RunReport& rep, const RunConfig& cfg) {
  using nlohmann::json;
  json config = json::array();
  for (const auto& [k, v] : cfg.echo) config.push_back({k, v});
  json quart = nullptr;
  if (rep.q_entity)
    quart = {{"entity", {{"q1", rep.q_entity->q1}, {"q3", rep.q_entity->q3}}},
             {"article", {{"q1", rep.q_article->q1}, {"q3", rep.q_article->q3}}}};
  json hist = json::object();
  for (const auto& [c, n] : rep.histogram) hist[std::string(to_string(c))] = n;
  json clustering = nullptr;
  if (rep.model) {
    json centroids = json::array();
    for (int c = 0; c < rep.model->k; ++c) {
      json jc = {{"cluster", c}, {"x", rep.model->centroids[c].x}, {"y", rep.model->centroids[c].y}};
      if (auto l = rep.cluster_labels.find(c); l != rep.cluster_labels.end())
        jc["joshi"] = std::string(to_string(l->second));
      centroids.push_back(std::move(jc));
    }
    clustering = {{"inertia", rep.model->inertia}, {"iterations", rep.model->iterations}, {"centroids", centroids}};
  }
  json nmi_ref = nullptr;
  if (rep.nmi_reference) nmi_ref = {{"value", *rep.nmi_reference}, {"common_languoids", rep.nmi_common}};
  return {
      {"tool_version", kToolVersion},
      {"config", config},
      {"sources", rep.sources},
      {"aggregation", "sum over sources, no entity deduplication"},
      {"article_statistic", kArticleStatistic},
      {"feature_transform", to_string(cfg.analysis.features)},
      {"divergence_features", "log10(1+n)"},
      {"quantile_method", kQuantileMethod},
      {"nmi_normalization", kNmiNormalization},
      {"k", cfg.analysis.kmeans.k},
      {"seed", cfg.analysis.kmeans.seed},
      {"restarts", cfg.analysis.kmeans.restarts},
      {"max_iter", cfg.analysis.kmeans.max_iter},
      {"tol", cfg.analysis.kmeans.tol},
      {"tau", cfg.analysis.tau},
      {"set_sizes", {{"L", rep.rows.size()}, {"L_LOD", rep.n_lod}, {"L_TXT", rep.n_txt}, {"L_star", rep.n_lstar}}},
      {"quartiles", quart},
      {"category_histogram", hist},
      {"clustering", clustering},
      {"nmi_reference", nmi_ref},
      {"warnings", rep.warnings},
  };
}

inline nlohmann::json report_to_json(const RunReport& rep, const RunConfig& cfg) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json jr = {{"wals_code", r.wals_code},
               {"name", r.name},
               {"entity_counts", r.entity_counts},
               {"entity_total", r.entity_total},
               {"article_count", r.article_count ? json(*r.article_count) : json()},
               {"in_L_star", r.in_lstar},
               {"x", r.features ? json(r.features->x) : json()},
               {"y", r.features ? json(r.features->y) : json()},
               {"cluster", r.cluster ? json(*r.cluster) : json()},
               {"joshi", r.joshi ? json(std::string(to_string(*r.joshi))) : json()},
               {"lod_category", std::string(to_string(r.category))},
               {"divergence_score", r.divergence ? json(r.divergence->score) : json()},
               {"divergence_class", r.divergence ? json(std::string(to_string(r.divergence->cls))) : json()}};
    rows.push_back(std::move(jr));
  }
  return {{"metadata", report_metadata(rep, cfg)}, {"rows", rows}};
}

inline void write_report_csv(std::ostream& os, const RunReport& rep) {
  std::vector<std::string> header = {"wals_code", "name"};
  for (const auto& s : rep.sources) header.push_back("entities_" + s);
  for (const char* h : {"entity_total", "article_count", "x", "y", "cluster", "joshi", "lod_category",
                        "divergence_score", "divergence_class"})
    header.emplace_back(h);
  csv::write_record(os, header);
  for (const auto& r : rep.rows) {
    std::vector<std::string> f = {r.wals_code, r.name};
    for (const auto& s : rep.sources) {
      auto it = r.entity_counts.find(s);
      f.push_back(it == r.entity_counts.end() ? "" : std::to_string(it->second));
    }
    f.push_back(std::to_string(r.entity_total));
    f.push_back(r.article_count ? std::to_string(*r.article_count) : "");
    f.push_back(r.features ? csv::format_double(r.features->x) : "");
    f.push_back(r.features ? csv::format_double(r.features->y) : "");
    f.push_back(r.cluster ? std::to_string(*r.cluster) : "");
    f.push_back(r.joshi ? std::string(to_string(*r.joshi)) : "");
    f.push_back(std::string(to_string(r.category)));
    f.push_back(r.divergence ? csv::format_double(r.divergence->score) : "");
    f.push_back(r.divergence ? std::string(to_string(r.divergence->cls)) : "");
    csv::write_record(os, f);
  }
}

// Plot-ready points (L* only), tab separated.
inline void write_scatter_tsv(std::ostream& os, const RunReport& rep) {
  csv::write_record(os, {"wals_code", "x", "y", "cluster", "joshi", "lod_category", "divergence_class"}, '\t');
  for (const auto& r : rep.rows) {
    if (!r.features) continue;
    csv::write_record(os,
                      {r.wals_code, csv::format_double(r.features->x), csv::format_double(r.features->y),
                       r.cluster ? std::to_string(*r.cluster) : "", r.joshi ? std::string(to_string(*r.joshi)) : "",
                       std::string(to_string(r.category)),
                       r.divergence ? std::string(to_string(r.divergence->cls)) : ""},
                      '\t');
  }
}

struct AnalyzeResult {
  RunReport report;
  StageResult stage;
};

inline AnalyzeResult cmd_analyze(const RunConfig& cfg, const std::string& coverage_path,
                                 const std::optional<std::string>& reference_path, std::ostream& log) {
  AnalyzeResult res;
  auto table = load_coverage(coverage_path);
  if (table.records().empty()) throw DataError("coverage table is empty");
  std::optional<std::map<std::string, std::string>> reference;
  if (reference_path) reference = load_reference_labels(*reference_path);
  res.report = analyze(table, cfg.analysis, reference ? &*reference : nullptr);
  res.stage.warnings = res.report.warnings;

  {
    auto out = detail::open_output(paths::report_json(cfg));
    out << report_to_json(res.report, cfg).dump(2) << '\n';
  }
  {
    auto out = detail::open_output(paths::report_csv(cfg));
    write_report_csv(out, res.report);
  }
  {
    auto out = detail::open_output(paths::scatter(cfg));
    write_scatter_tsv(out, res.report);
  }
  res.stage.outputs = {paths::report_json(cfg), paths::report_csv(cfg), paths::scatter(cfg)};
  log << "analyze: " << res.report.rows.size() << " languoids, |L*| = " << res.report.n_lstar << "\n";
  return res;
}

// ---- report -------------------------------------------------------------

inline void print_summary(std::ostream& os, const RunReport& rep) {
  os << "languoids in scope: " << rep.rows.size() << "\n"
     << "|L_LOD| = " << rep.n_lod << ", |L_TXT| = " << rep.n_txt << ", |L*| = " << rep.n_lstar << "\n";
  if (rep.q_entity)
    os << "entity quartiles:  Q1 = " << csv::format_double(rep.q_entity->q1)
       << ", Q3 = " << csv::format_double(rep.q_entity->q3) << "\n"
       << "article quartiles: Q1 = " << csv::format_double(rep.q_article->q1)
       << ", Q3 = " << csv::format_double(rep.q_article->q3) << "\n";
  os << "categories:";
  for (auto c : kLodCategories) os << " " << to_string(c) << "=" << rep.histogram.at(c);
  os << "\n";
  if (!rep.cluster_labels.empty()) {
    std::map<JoshiCategory, std::size_t> joshi;
    for (const auto& r : rep.rows)
      if (r.joshi) ++joshi[*r.joshi];
    os << "joshi clusters:";
    for (const auto& [j, n] : joshi) os << " " << to_string(j) << "=" << n;
    os << "\n";
  }
  if (rep.nmi_reference)
    os << "NMI vs reference: " << csv::format_double(*rep.nmi_reference) << " over " << rep.nmi_common
       << " languoids\n";
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
}

inline AnalyzeResult cmd_report(const RunConfig& cfg, Transport* transport, std::ostream& out, std::ostream& log) {
  StageResult all;
  const bool needs_count = std::any_of(cfg.sources.begin(), cfg.sources.end(),
                                       [](const SourceConfig& s) { return s.kind != SourceKind::counts; });
  if (needs_count) all.absorb(cmd_count(cfg, transport, log));
  if (!cfg.articles_csv) {
    if (!transport) throw ConfigError("fetching Wikipedia statistics needs network access");
    all.absorb(cmd_fetch_wiki(cfg, *transport, log));
  }
  all.absorb(cmd_build(cfg, log).stage);
  auto res = cmd_analyze(cfg, paths::coverage(cfg), cfg.analysis.reference_labels, log);
  all.absorb(res.stage);
  res.stage = std::move(all);
  print_summary(out, res.report);
  return res;
}

}  // namespace lodcov
