#pragma once

// Helpers shared by the test binaries: fixture paths, scratch directories and
// the brute-force oracles the library is checked against.

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>
#include <vector>

namespace testing_support {

inline std::string fixture(const std::string& name) { return std::string(LODCOV_FIXTURES) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Removed on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lodcov-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void gzip_file(const std::string& src, const std::string& dst) {
  auto data = slurp(src);
  gzFile gz = gzopen(dst.c_str(), "wb");
  if (!gz) throw std::runtime_error("gzopen failed for " + dst);
  gzwrite(gz, data.data(), static_cast<unsigned>(data.size()));
  gzclose(gz);
}

// ---- oracles ------------------------------------------------------------

// Full sort, then interpolate between order statistics floor(h) and
// floor(h)+1 with h = p(n-1).
inline double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const double lo_f = std::floor(h);
  const auto lo = static_cast<std::size_t>(lo_f);
  if (lo + 1 >= v.size()) return v[lo];
  return v[lo] + (h - lo_f) * (v[lo + 1] - v[lo]);
}

// NMI straight from the textbook formula over an explicit contingency table:
// I / ((H(U) + H(V)) / 2), natural log.
inline double oracle_nmi(const std::vector<std::vector<double>>& table) {
  double n = 0;
  std::vector<double> rows(table.size(), 0.0), cols(table.empty() ? 0 : table[0].size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table[i].size(); ++j) {
      n += table[i][j];
      rows[i] += table[i][j];
      cols[j] += table[i][j];
    }
  double hu = 0, hv = 0, mi = 0;
  for (double r : rows)
    if (r > 0) hu -= r / n * std::log(r / n);
  for (double c : cols)
    if (c > 0) hv -= c / n * std::log(c / n);
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table[i].size(); ++j)
      if (table[i][j] > 0) mi += table[i][j] / n * std::log(table[i][j] * n / (rows[i] * cols[j]));
  return mi / ((hu + hv) / 2);
}

// Labeling pair -> contingency table.
inline std::vector<std::vector<double>> contingency(const std::vector<int>& a, const std::vector<int>& b) {
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<double>> t(ka, std::vector<double>(kb, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) t[a[i]][b[i]] += 1;
  return t;
}

// Independent quartile categorizer: Low = strictly below Q1 on both axes,
// High = strictly above Q3 on both, Medium = inside [Q1, Q3] on both.
inline std::string oracle_category(double e, double w, double e1, double e3, double w1, double w3) {
  if (e < e1 && w < w1) return "Low";
  if (e > e3 && w > w3) return "High";
  if (e1 <= e && e <= e3 && w1 <= w && w <= w3) return "Medium";
  return "Unclassified";
}

}  // namespace testing_support
