#pragma once

// Per-language features and the categorizations built on them: Joshi labels
// for k-means clusters, the quartile-based LOD categories, and the
// divergence between entity and article coverage.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lodcov/coverage.hpp"
#include "lodcov/kmeans.hpp"
#include "lodcov/quantile.hpp"

namespace lodcov {

// ---- features -------------------------------------------------------------

enum class FeatureTransform { log10p1, raw };

inline const char* to_string(FeatureTransform f) { return f == FeatureTransform::log10p1 ? "log10(1+n)" : "raw"; }

struct FeaturePoint {
  std::string wals_code;
  Point2 p;  // x: articles, y: entities
};

inline double log10p1(std::uint64_t n) { return std::log10(1.0 + static_cast<double>(n)); }

// Requires the record to be in L* for the selected sources.
inline FeaturePoint make_features(const CoverageRecord& record, std::span<const SourceId> selected,
                                  FeatureTransform transform = FeatureTransform::log10p1) {
  const auto entities = aggregate_entity_count(record, selected);
  const auto articles = record.article_count.value_or(0);
  if (entities == 0 || articles == 0)
    throw std::invalid_argument("features requested for `" + record.languoid.wals_code + "`, which is outside L*");
  if (transform == FeatureTransform::raw)
    return {record.languoid.wals_code, {static_cast<double>(articles), static_cast<double>(entities)}};
  return {record.languoid.wals_code, {log10p1(articles), log10p1(entities)}};
}

inline FeaturePoint log_features(const CoverageRecord& record, std::span<const SourceId> selected) {
  return make_features(record, selected, FeatureTransform::log10p1);
}

// ---- Joshi labels -------------------------------------------------------

enum class JoshiCategory : int {
  left_behinds = 0,
  scrapping_bys = 1,
  hopefuls = 2,
  rising_stars = 3,
  underdogs = 4,
  winner = 5,
};

inline constexpr std::array<std::string_view, 6> kJoshiNames = {
    "Left-Behinds", "Scrapping-Bys", "Hopefuls", "Rising Stars", "Underdogs", "Winner"};

inline std::string_view to_string(JoshiCategory c) { return kJoshiNames.at(static_cast<std::size_t>(c)); }

// Ranks clusters by centroid x+y (ties: smaller x first); rank r is Joshi
// class r, so the lowest-coverage cluster becomes Left-Behinds.
inline std::map<int, JoshiCategory> label_clusters(const ClusterModel& model) {
  if (model.k != 6 || model.centroids.size() != 6)
    throw std::invalid_argument("Joshi labeling requires k = 6, got " + std::to_string(model.k));
  std::array<int, 6> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = model.centroids[a];
    const auto& cb = model.centroids[b];
    const double sa = ca.x + ca.y;
    const double sb = cb.x + cb.y;
    if (sa != sb) return sa < sb;
    return ca.x < cb.x;
  });
  std::map<int, JoshiCategory> labels;
  for (int rank = 0; rank < 6; ++rank) labels[order[rank]] = static_cast<JoshiCategory>(rank);
  return labels;
}

// ---- quartile categories ------------------------------------------------

enum class LodCategory { missing, low, medium, high, unclassified };

inline constexpr std::array<LodCategory, 5> kLodCategories = {LodCategory::missing, LodCategory::low,
                                                              LodCategory::medium, LodCategory::high,
                                                              LodCategory::unclassified};

inline std::string_view to_string(LodCategory c) {
  switch (c) {
    case LodCategory::missing: return "Missing";
    case LodCategory::low: return "Low";
    case LodCategory::medium: return "Medium";
    case LodCategory::high: return "High";
    case LodCategory::unclassified: return "Unclassified";
  }
  return "?";
}

// Low and High use strict bounds, Medium the closed interval [Q1, Q3], so
// values sitting exactly on a quartile are Medium.
inline LodCategory lod_categorize(double e, double w, const Quartiles& q_entities, const Quartiles& q_articles,
                                  bool in_lstar) {
  if (!in_lstar) return LodCategory::missing;
  if (e < q_entities.q1 && w < q_articles.q1) return LodCategory::low;
  if (e > q_entities.q3 && w > q_articles.q3) return LodCategory::high;
  if (e >= q_entities.q1 && e <= q_entities.q3 && w >= q_articles.q1 && w <= q_articles.q3)
    return LodCategory::medium;
  return LodCategory::unclassified;
}

// ---- divergence ---------------------------------------------------------

enum class Divergence { left, right, near_linear };

inline std::string_view to_string(Divergence d) {
  switch (d) {
    case Divergence::left: return "Left";
    case Divergence::right: return "Right";
    case Divergence::near_linear: return "NearLinear";
  }
  return "?";
}

inline constexpr double kDefaultTau = 0.5;

struct DivergenceClass {
  double score = 0;  // y - x in decades
  Divergence cls = Divergence::near_linear;
  double tau = kDefaultTau;
};

inline Divergence classify_divergence(double score, double tau) {
  if (score > tau) return Divergence::left;
  if (score < -tau) return Divergence::right;
  return Divergence::near_linear;
}

// `point` must carry log10(1+n) features.
inline DivergenceClass divergence(const FeaturePoint& point, double tau = kDefaultTau) {
  if (!(tau > 0)) throw std::invalid_argument("divergence threshold tau must be positive");
  const double score = point.p.y - point.p.x;
  return {score, classify_divergence(score, tau), tau};
}

}  // namespace lodcov
