#pragma once

// Lloyd's k-means on 2-D points with k-means++ seeding.
//
// Everything random is drawn from a seeded mt19937_64 with explicit
// double conversion, so a given (points, params) pair produces the same model
// on every platform.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lodcov {

struct Point2 {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double squared_distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct KMeansParams {
  int k = 6;
  std::uint64_t seed = 42;
  int max_iter = 300;
  double tol = 1e-9;  // stop once every centroid moves less than this
  int restarts = 1;   // best-of-N by inertia
};

struct ClusterModel {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<Point2> centroids;
  std::vector<int> assignments;  // parallel to the input points
  double inertia = 0;
  int iterations = 0;
  std::vector<double> inertia_history;  // after every assignment step

  friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

namespace detail {

class KMeansRun {
 public:
  KMeansRun(std::span<const Point2> points, const KMeansParams& params, std::mt19937_64& rng)
      : pts_(points), params_(params), rng_(rng) {}

  ClusterModel run() {
    ClusterModel m;
    m.k = params_.k;
    m.seed = params_.seed;
    m.centroids = seed_plus_plus();
    m.assignments.assign(pts_.size(), 0);

    for (int it = 0; it < params_.max_iter; ++it) {
      m.inertia_history.push_back(assign(m));
      ++m.iterations;
      auto previous = m.centroids;
      update(m);
      double shift = 0;
      for (int c = 0; c < m.k; ++c) shift = std::max(shift, std::sqrt(squared_distance(previous[c], m.centroids[c])));
      if (shift < params_.tol) break;
    }
    m.inertia = assign(m);
    m.inertia_history.push_back(m.inertia);
    return m;
  }

 private:
  std::span<const Point2> pts_;
  const KMeansParams& params_;
  std::mt19937_64& rng_;

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::size_t uniform_index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  std::vector<Point2> seed_plus_plus() {
    std::vector<Point2> centers;
    centers.push_back(pts_[uniform_index(pts_.size())]);
    std::vector<double> d2(pts_.size());
    while (static_cast<int>(centers.size()) < params_.k) {
      double total = 0;
      for (std::size_t i = 0; i < pts_.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) best = std::min(best, squared_distance(pts_[i], c));
        d2[i] = best;
        total += best;
      }
      if (total <= 0) {
        centers.push_back(pts_[uniform_index(pts_.size())]);
        continue;
      }
      const double target = uniform() * total;
      double acc = 0;
      std::size_t pick = pts_.size();
      for (std::size_t i = 0; i < pts_.size(); ++i) {
        if (d2[i] <= 0) continue;
        pick = i;
        acc += d2[i];
        if (acc > target) break;
      }
      centers.push_back(pts_[pick]);
    }
    return centers;
  }

  // Nearest centroid, lowest index on ties. Returns the inertia.
  double assign(ClusterModel& m) const {
    double inertia = 0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      int best = 0;
      double best_d = squared_distance(pts_[i], m.centroids[0]);
      for (int c = 1; c < m.k; ++c) {
        const double d = squared_distance(pts_[i], m.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      m.assignments[i] = best;
      inertia += best_d;
    }
    return inertia;
  }

  // Centroids become cluster means. An empty cluster takes the point farthest
  // from its own centroid; each point donates at most once.
  void update(ClusterModel& m) const {
    std::vector<Point2> sum(m.k);
    std::vector<std::size_t> size(m.k, 0);
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      auto c = m.assignments[i];
      sum[c].x += pts_[i].x;
      sum[c].y += pts_[i].y;
      ++size[c];
    }
    std::vector<bool> donated(pts_.size(), false);
    const auto old = m.centroids;
    for (int c = 0; c < m.k; ++c) {
      if (size[c] > 0) {
        m.centroids[c] = {sum[c].x / static_cast<double>(size[c]), sum[c].y / static_cast<double>(size[c])};
        continue;
      }
      std::size_t far = pts_.size();
      double far_d = -1;
      for (std::size_t i = 0; i < pts_.size(); ++i) {
        if (donated[i]) continue;
        const double d = squared_distance(pts_[i], old[m.assignments[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < pts_.size()) {
        donated[far] = true;
        m.centroids[c] = pts_[far];
      }
    }
  }
};

}  // namespace detail

inline ClusterModel kmeans(std::span<const Point2> points, const KMeansParams& params) {
  if (params.k < 1) throw std::invalid_argument("k must be positive");
  if (params.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (!(params.tol > 0)) throw std::invalid_argument("tol must be positive");
  if (points.size() < static_cast<std::size_t>(params.k))
    throw std::invalid_argument("k-means needs at least k points (" + std::to_string(points.size()) + " < " +
                                std::to_string(params.k) + ")");
  std::mt19937_64 rng(params.seed);
  ClusterModel best;
  for (int r = 0; r < std::max(1, params.restarts); ++r) {
    auto m = detail::KMeansRun(points, params, rng).run();
    if (r == 0 || m.inertia < best.inertia) best = std::move(m);
  }
  return best;
}

}  // namespace lodcov
