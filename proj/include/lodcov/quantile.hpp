#pragma once

// Empirical quantiles by linear interpolation between order statistics:
//   h = p * (n - 1),  q = v[floor(h)] + (h - floor(h)) * (v[floor(h) + 1] - v[floor(h)])
// over the ascending sample v.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <ranges>
#include <stdexcept>
#include <vector>

namespace lodcov {

inline constexpr const char* kQuantileMethod = "linear interpolation, h = p*(n-1)";

struct Quartiles {
  double q1 = 0;
  double q3 = 0;
  friend bool operator==(const Quartiles&, const Quartiles&) = default;
};

template <std::ranges::input_range R>
  requires std::convertible_to<std::ranges::range_value_t<R>, double>
double quantile(const R& sample, double p) {
  std::vector<double> v;
  for (auto&& x : sample) v.push_back(static_cast<double>(x));
  if (v.empty()) throw std::invalid_argument("quantile of an empty distribution");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");

  const double h = p * static_cast<double>(v.size() - 1);
  const double lo_f = std::floor(h);
  const auto lo = static_cast<std::size_t>(lo_f);
  const double frac = h - lo_f;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size()) return a;
  // After nth_element everything right of `lo` is >= v[lo]; its minimum is
  // the next order statistic.
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + frac * (b - a);
}

template <std::ranges::input_range R>
  requires std::convertible_to<std::ranges::range_value_t<R>, double>
Quartiles quartiles(const R& sample) {
  return {quantile(sample, 0.25), quantile(sample, 0.75)};
}

}  // namespace lodcov
