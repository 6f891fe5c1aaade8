#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "lodcov/categorize.hpp"
#include "lodcov/kmeans.hpp"
#include "lodcov/nmi.hpp"
#include "lodcov/quantile.hpp"
#include "test_support.hpp"

using namespace lodcov;
using testing_support::oracle_nmi;
using testing_support::oracle_quantile;

// ---- quantiles --------------------------------------------------------------

TEST(Quantile, SmallKnownValues) {
  std::vector<int> v = {1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(quartiles(v), (Quartiles{2.75, 6.25}));
  std::vector<int> nine = {9, 1, 8, 2, 7, 3, 6, 4, 5};
  EXPECT_EQ(quartiles(nine), (Quartiles{3, 7}));
  std::vector<double> one = {42};
  EXPECT_EQ(quartiles(one), (Quartiles{42, 42}));
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 8.0);
  EXPECT_EQ(quantile(v, 0.5), 4.5);
}

TEST(Quantile, Errors) {
  std::vector<int> empty;
  EXPECT_THROW(quantile(empty, 0.5), std::invalid_argument);
  std::vector<int> v = {1};
  EXPECT_THROW(quantile(v, 1.5), std::invalid_argument);
  EXPECT_THROW(quantile(v, -0.1), std::invalid_argument);
}

TEST(Quantile, MatchesSortOracleWithTies) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(rng() % 7);
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) EXPECT_EQ(quantile(v, p), oracle_quantile(v, p));
  }
}

// ---- NMI --------------------------------------------------------------------

namespace {

std::map<int, int> as_map(const std::vector<int>& labels) {
  std::map<int, int> m;
  for (std::size_t i = 0; i < labels.size(); ++i) m[static_cast<int>(i)] = labels[i];
  return m;
}

}  // namespace

TEST(Nmi, IdenticalIsOne) {
  std::vector<int> p = {0, 0, 1, 1, 2, 2, 2};
  EXPECT_NEAR(nmi(as_map(p), as_map(p)), 1.0, 1e-12);
}

TEST(Nmi, SingleClusterAgainstAnythingElseIsZero) {
  std::vector<int> all(10, 0);
  std::vector<int> p = {0, 1, 0, 1, 2, 2, 0, 1, 2, 0};
  EXPECT_EQ(nmi(as_map(all), as_map(p)), 0.0);
  EXPECT_EQ(nmi(as_map(p), as_map(all)), 0.0);
}

TEST(Nmi, TwoSingleClustersAreIdentical) {
  std::vector<int> a(5, 0), b(5, 3);
  EXPECT_EQ(nmi(as_map(a), as_map(b)), 1.0);
}

TEST(Nmi, IndependentPartitionsGiveZero) {
  std::vector<int> a = {0, 0, 1, 1};
  std::vector<int> b = {0, 1, 0, 1};
  EXPECT_NEAR(nmi(as_map(a), as_map(b)), 0.0, 1e-15);
}

TEST(Nmi, MatchesContingencyOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng() % 80;
    std::vector<int> a(n), b(n);
    const int ka = 2 + static_cast<int>(rng() % 4), kb = 2 + static_cast<int>(rng() % 4);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % ka);
      b[i] = (rng() % 3 == 0) ? a[i] % kb : static_cast<int>(rng() % kb);
    }
    // Skip degenerate draws; they are covered above.
    if (std::set<int>(a.begin(), a.end()).size() < 2 || std::set<int>(b.begin(), b.end()).size() < 2) continue;
    const double got = nmi(as_map(a), as_map(b));
    const double want = oracle_nmi(testing_support::contingency(a, b));
    EXPECT_NEAR(got, want, 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(Nmi, StringLabelsAndKeySets) {
  std::map<std::string, std::string> a = {{"x", "Winner"}, {"y", "Hopefuls"}};
  std::map<std::string, int> b = {{"x", 1}, {"y", 0}};
  EXPECT_EQ(nmi(a, b), 1.0);
  std::map<std::string, int> c = {{"x", 1}, {"z", 0}};
  EXPECT_THROW(nmi(a, c), std::invalid_argument);
  std::map<std::string, int> empty;
  EXPECT_THROW(nmi(a, empty), std::invalid_argument);
}

// ---- k-means ----------------------------------------------------------------

namespace {

std::vector<Point2> blobs(const std::vector<Point2>& centers, int per, double sigma, std::uint64_t seed,
                          std::vector<int>* labels = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Point2> pts;
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (int i = 0; i < per; ++i) {
      pts.push_back({centers[c].x + noise(rng), centers[c].y + noise(rng)});
      if (labels) labels->push_back(static_cast<int>(c));
    }
  return pts;
}

}  // namespace

TEST(KMeans, RecoversSeparatedBlobs) {
  std::vector<Point2> centers = {{0, 0}, {5, 0}, {0, 5}, {5, 5}};
  std::vector<int> truth;
  auto pts = blobs(centers, 25, 0.2, 1, &truth);
  auto m = kmeans(pts, {4, 42, 300, 1e-9, 3});
  std::map<int, int> ours, gen;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ours[static_cast<int>(i)] = m.assignments[i];
    gen[static_cast<int>(i)] = truth[i];
  }
  EXPECT_EQ(nmi(ours, gen), 1.0);
}

TEST(KMeans, InertiaHistoryIsNonIncreasing) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2> pts(200);
    for (auto& p : pts) p = {u(rng), u(rng)};
    auto m = kmeans(pts, {6, static_cast<std::uint64_t>(trial), 300, 1e-12, 1});
    ASSERT_GE(m.inertia_history.size(), 2u);
    for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
      EXPECT_LE(m.inertia_history[i], m.inertia_history[i - 1] * (1 + 1e-12));
    EXPECT_EQ(m.inertia, m.inertia_history.back());
  }
}

TEST(KMeans, InertiaIsSumOfSquaredDistancesToAssignedCentroid) {
  auto pts = blobs({{0, 0}, {3, 3}, {6, 0}}, 20, 0.5, 4);
  auto m = kmeans(pts, {3, 7, 300, 1e-9, 1});
  double sse = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sse += squared_distance(pts[i], m.centroids[m.assignments[i]]);
    for (const auto& c : m.centroids)
      EXPECT_LE(squared_distance(pts[i], m.centroids[m.assignments[i]]), squared_distance(pts[i], c));
  }
  EXPECT_NEAR(sse, m.inertia, 1e-9 * std::max(1.0, sse));
}

TEST(KMeans, DeterministicForSeed) {
  auto pts = blobs({{0, 0}, {2, 1}, {1, 3}}, 30, 0.7, 9);
  auto a = kmeans(pts, {5, 123, 300, 1e-9, 2});
  auto b = kmeans(pts, {5, 123, 300, 1e-9, 2});
  EXPECT_EQ(a, b);
}

TEST(KMeans, RestartsNeverWorsenInertia) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point2> pts(150);
  for (auto& p : pts) p = {u(rng), u(rng)};
  auto one = kmeans(pts, {6, 5, 300, 1e-9, 1});
  auto many = kmeans(pts, {6, 5, 300, 1e-9, 8});
  EXPECT_LE(many.inertia, one.inertia);
}

TEST(KMeans, DuplicatePointsAndExactlyKPoints) {
  std::vector<Point2> same(10, Point2{1, 1});
  auto m = kmeans(same, {3, 1, 50, 1e-9, 1});
  EXPECT_EQ(m.inertia, 0.0);
  std::vector<Point2> six = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
  auto s = kmeans(six, {6, 42, 100, 1e-9, 1});
  EXPECT_EQ(s.inertia, 0.0);
  EXPECT_EQ(std::set<int>(s.assignments.begin(), s.assignments.end()).size(), 6u);
}

TEST(KMeans, InvalidParameters) {
  std::vector<Point2> pts = {{0, 0}, {1, 1}};
  EXPECT_THROW(kmeans(pts, {3, 1, 10, 1e-9, 1}), std::invalid_argument);
  EXPECT_THROW(kmeans(pts, {0, 1, 10, 1e-9, 1}), std::invalid_argument);
  EXPECT_THROW(kmeans(pts, {1, 1, 0, 1e-9, 1}), std::invalid_argument);
  EXPECT_THROW(kmeans(pts, {1, 1, 10, 0.0, 1}), std::invalid_argument);
}

// ---- labels and categories ----------------------------------------------------

TEST(Joshi, ClustersRankedByCoverage) {
  ClusterModel m;
  m.k = 6;
  m.centroids = {{5, 5}, {1, 1}, {3, 2}, {2, 3}, {0.5, 0.2}, {4, 4}};
  auto l = label_clusters(m);
  EXPECT_EQ(l.at(4), JoshiCategory::left_behinds);
  EXPECT_EQ(l.at(1), JoshiCategory::scrapping_bys);
  EXPECT_EQ(l.at(3), JoshiCategory::hopefuls);  // tie on x+y: smaller x first
  EXPECT_EQ(l.at(2), JoshiCategory::rising_stars);
  EXPECT_EQ(l.at(5), JoshiCategory::underdogs);
  EXPECT_EQ(l.at(0), JoshiCategory::winner);
  EXPECT_EQ(to_string(JoshiCategory::winner), "Winner");
  m.k = 5;
  m.centroids.pop_back();
  EXPECT_THROW(label_clusters(m), std::invalid_argument);
}

TEST(LodCategory, QuartileRules) {
  const Quartiles q{2.75, 6.25};
  EXPECT_EQ(lod_categorize(2, 2, q, q, true), LodCategory::low);
  EXPECT_EQ(lod_categorize(4, 4, q, q, true), LodCategory::medium);
  EXPECT_EQ(lod_categorize(7, 7, q, q, true), LodCategory::high);
  EXPECT_EQ(lod_categorize(2, 7, q, q, true), LodCategory::unclassified);
  EXPECT_EQ(lod_categorize(2.75, 2.75, q, q, true), LodCategory::medium);
  EXPECT_EQ(lod_categorize(6.25, 6.25, q, q, true), LodCategory::medium);
  EXPECT_EQ(lod_categorize(2.75, 2, q, q, true), LodCategory::unclassified);
  EXPECT_EQ(lod_categorize(7, 7, q, q, false), LodCategory::missing);
}

TEST(LodCategory, MatchesIndependentOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const double e1 = rng() % 10, e3 = e1 + rng() % 10, w1 = rng() % 10, w3 = w1 + rng() % 10;
    const double e = rng() % 25, w = rng() % 25;
    auto got = lod_categorize(e, w, {e1, e3}, {w1, w3}, true);
    EXPECT_EQ(std::string(to_string(got)), testing_support::oracle_category(e, w, e1, e3, w1, w3));
  }
}

TEST(Features, LogTransformAndLstarGuard) {
  std::vector<SourceId> sel = {"kb"};
  CoverageRecord r{{"eng", "English", "eng", true}, {{"kb", 999}}, 9};
  auto f = make_features(r, sel);
  EXPECT_DOUBLE_EQ(f.p.x, 1.0);
  EXPECT_DOUBLE_EQ(f.p.y, 3.0);
  auto raw = make_features(r, sel, FeatureTransform::raw);
  EXPECT_EQ(raw.p, (Point2{9, 999}));
  CoverageRecord outside{{"xxx", "X", std::nullopt, true}, {{"kb", 5}}, std::nullopt};
  EXPECT_THROW(make_features(outside, sel), std::invalid_argument);
}

TEST(Divergence, ThresholdOnLogScale) {
  FeaturePoint balanced{"a", {3.0, 3.2}};
  FeaturePoint left{"b", {2.0, 4.0}};
  FeaturePoint right{"c", {5.0, 3.0}};
  EXPECT_EQ(divergence(balanced).cls, Divergence::near_linear);
  EXPECT_EQ(divergence(left).cls, Divergence::left);
  EXPECT_DOUBLE_EQ(divergence(left).score, 2.0);
  EXPECT_EQ(divergence(right).cls, Divergence::right);
  EXPECT_EQ(classify_divergence(0.5, 0.5), Divergence::near_linear);
  EXPECT_EQ(classify_divergence(-0.5, 0.5), Divergence::near_linear);
  EXPECT_THROW(divergence(left, 0.0), std::invalid_argument);
}
