// lodcov: language coverage of LOD knowledge graphs against Wikipedia.
//
//   lodcov count      --config run.conf     per-tag entity counts from dumps / SPARQL
//   lodcov fetch-wiki --config run.conf     Wikipedia article counts
//   lodcov build      --config run.conf     coverage table (JSON)
//   lodcov analyze    --config run.conf     clusters, categories, divergence
//   lodcov report     --config run.conf     all of the above plus a summary
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 completed with
// warnings.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "lodcov/http_transport.hpp"
#include "lodcov/lodcov.hpp"

namespace {

struct Overrides {
  std::string out_dir;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<double> tau;
  bool raw_features = false;
  bool strict = false;
  std::string mode;
  std::optional<std::size_t> threads;
  std::string reference;
};

void apply(lodcov::RunConfig& cfg, const Overrides& o) {
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (o.k) cfg.analysis.kmeans.k = *o.k;
  if (o.seed) cfg.analysis.kmeans.seed = *o.seed;
  if (o.restarts) cfg.analysis.kmeans.restarts = *o.restarts;
  if (o.tau) cfg.analysis.tau = *o.tau;
  if (o.raw_features) cfg.analysis.features = lodcov::FeatureTransform::raw;
  if (o.strict) cfg.strict = true;
  if (o.mode == "exact") cfg.count_mode = lodcov::CountMode::exact;
  if (o.mode == "approximate") cfg.count_mode = lodcov::CountMode::approximate;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.reference.empty()) cfg.analysis.reference_labels = o.reference;
  // Overrides are part of the run, so they belong in the report's config echo.
  auto echo = [&](const char* key, const std::string& v) { cfg.echo.emplace_back(std::string("cli.") + key, v); };
  if (o.k) echo("k", std::to_string(*o.k));
  if (o.seed) echo("seed", std::to_string(*o.seed));
  if (o.restarts) echo("restarts", std::to_string(*o.restarts));
  if (o.tau) echo("tau", lodcov::csv::format_double(*o.tau));
  if (o.raw_features) echo("features", "raw");
  if (o.strict) echo("strict", "true");
  if (!o.mode.empty()) echo("mode", o.mode);
  if (!o.reference.empty()) echo("reference", o.reference);
}

int finish(const lodcov::StageResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& o : r.outputs) std::cerr << "wrote " << o << "\n";
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language coverage of Linked Open Data knowledge graphs"};
  app.set_version_flag("--version", lodcov::kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string coverage_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", ov.out_dir, "Output directory (overrides output.dir)");
  };
  auto add_count_opts = [&](CLI::App* sub) {
    sub->add_flag("--strict", ov.strict, "Abort on the first malformed line");
    sub->add_option("--mode", ov.mode, "Counting mode")->check(CLI::IsMember({"exact", "approximate"}));
    sub->add_option("--threads", ov.threads, "Worker threads for multi-file dumps")->check(CLI::PositiveNumber);
  };
  auto add_analysis_opts = [&](CLI::App* sub) {
    sub->add_option("--k", ov.k, "Number of clusters")->check(CLI::PositiveNumber);
    sub->add_option("--seed", ov.seed, "k-means seed");
    sub->add_option("--restarts", ov.restarts, "k-means restarts (lowest inertia wins)")->check(CLI::PositiveNumber);
    sub->add_option("--tau", ov.tau, "Divergence threshold in decades")->check(CLI::PositiveNumber);
    sub->add_flag("--raw-features", ov.raw_features, "Cluster on raw counts instead of log10(1+n)");
    sub->add_option("--reference", ov.reference, "Reference labels CSV (wals_code,label) for NMI")
        ->check(CLI::ExistingFile);
  };

  auto* count = app.add_subcommand("count", "Count language-tagged entities per source");
  add_common(count);
  add_count_opts(count);
  auto* fetch = app.add_subcommand("fetch-wiki", "Fetch Wikipedia article counts");
  add_common(fetch);
  auto* build = app.add_subcommand("build", "Assemble the coverage table");
  add_common(build);
  auto* analyze = app.add_subcommand("analyze", "Cluster and categorize languages");
  add_common(analyze);
  add_analysis_opts(analyze);
  analyze->add_option("--coverage", coverage_path, "Coverage JSON (default <out>/coverage.json)")
      ->check(CLI::ExistingFile);
  auto* report = app.add_subcommand("report", "Run the whole pipeline and print a summary");
  add_common(report);
  add_count_opts(report);
  add_analysis_opts(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lodcov::kExitUsage;
  }

  try {
    auto cfg = lodcov::load_config(config_path);
    apply(cfg, ov);
    cfg.validate();
    lodcov::HttplibTransport transport;

    if (count->parsed()) return finish(lodcov::cmd_count(cfg, &transport, std::cerr));
    if (fetch->parsed()) return finish(lodcov::cmd_fetch_wiki(cfg, transport, std::cerr));
    if (build->parsed()) return finish(lodcov::cmd_build(cfg, std::cerr).stage);
    if (analyze->parsed()) {
      auto path = coverage_path.empty() ? lodcov::paths::coverage(cfg) : coverage_path;
      return finish(lodcov::cmd_analyze(cfg, path, cfg.analysis.reference_labels, std::cerr).stage);
    }
    if (report->parsed()) return finish(lodcov::cmd_report(cfg, &transport, std::cout, std::cerr).stage);
  } catch (const lodcov::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lodcov::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lodcov::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lodcov::kExitData;
  }
  return lodcov::kExitUsage;
}
