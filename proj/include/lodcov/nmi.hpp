#pragma once

// Normalized mutual information between two labelings of the same items,
// NMI = I(A;B) / ((H(A) + H(B)) / 2), natural logarithms.
//
// Identical partitions (equal up to relabeling) score exactly 1. Otherwise a
// partition with zero entropy scores 0.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace lodcov {

inline constexpr const char* kNmiNormalization = "arithmetic mean of entropies, natural log";

template <typename Key, typename LabelA, typename LabelB>
double nmi(const std::map<Key, LabelA>& a, const std::map<Key, LabelB>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("nmi of an empty labeling");
  if (a.size() != b.size()) throw std::invalid_argument("nmi: labelings cover different item sets");

  std::map<LabelA, double> count_a;
  std::map<LabelB, double> count_b;
  std::map<std::pair<LabelA, LabelB>, double> joint;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw std::invalid_argument("nmi: labelings cover different item sets");
    count_a[ia->second] += 1;
    count_b[ib->second] += 1;
    joint[{ia->second, ib->second}] += 1;
  }

  // Same partition: every cell is a full row and a full column.
  if (joint.size() == count_a.size() && joint.size() == count_b.size()) return 1.0;

  const double n = static_cast<double>(a.size());
  auto entropy = [n](const auto& counts) {
    double h = 0;
    for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double ha = entropy(count_a);
  const double hb = entropy(count_b);
  if (ha == 0.0 || hb == 0.0) return 0.0;

  double mi = 0;
  for (const auto& [cell, c] : joint)
    mi += (c / n) * std::log(n * c / (count_a[cell.first] * count_b[cell.second]));
  return std::clamp(mi / (0.5 * (ha + hb)), 0.0, 1.0);
}

}  // namespace lodcov
