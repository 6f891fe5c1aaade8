#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace lodcov {

// MurmurHash64A (Austin Appleby), little-endian block loads.
inline std::uint64_t murmur64a(std::string_view key, std::uint64_t seed) noexcept {
  constexpr std::uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;
  const auto len = key.size();
  std::uint64_t h = seed ^ (static_cast<std::uint64_t>(len) * m);
  const char* data = key.data();
  const std::size_t blocks = len / 8;
  for (std::size_t i = 0; i < blocks; ++i) {
    std::uint64_t k;
    std::memcpy(&k, data + i * 8, 8);
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }
  const auto* tail = reinterpret_cast<const unsigned char*>(data + blocks * 8);
  switch (len & 7) {
    case 7: h ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
    case 6: h ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
    case 5: h ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
    case 4: h ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
    case 3: h ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
    case 2: h ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
    case 1: h ^= std::uint64_t(tail[0]); h *= m;
  }
  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

// HyperLogLog sketch over 64-bit hashes with 2^p one-byte registers.
//
// Cardinality uses Ertl's improved raw estimator ("New cardinality estimation
// algorithms for HyperLogLog sketches", 2017), which is unbiased over the
// whole range without empirical correction tables. Merge is the register-wise
// maximum, so it is associative, commutative and idempotent.
class HyperLogLog {
 public:
  static constexpr int kMinPrecision = 4;
  static constexpr int kMaxPrecision = 18;
  static constexpr int kDefaultPrecision = 14;
  static constexpr std::uint64_t kDefaultSeed = 0x5eed'1a6c'0ffe'e123ULL;

  explicit HyperLogLog(int precision = kDefaultPrecision, std::uint64_t seed = kDefaultSeed)
      : p_(precision), seed_(seed) {
    if (precision < kMinPrecision || precision > kMaxPrecision)
      throw std::invalid_argument("HyperLogLog precision must be in [4, 18]");
    registers_.assign(std::size_t{1} << p_, 0);
  }

  int precision() const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const std::uint8_t> registers() const noexcept { return registers_; }

  void add(std::string_view item) noexcept { add_hash(murmur64a(item, seed_)); }

  void add_hash(std::uint64_t h) noexcept {
    const std::size_t idx = static_cast<std::size_t>(h >> (64 - p_));
    const std::uint64_t w = h << p_;
    const int q = 64 - p_;
    const auto rho = static_cast<std::uint8_t>(std::min(std::countl_zero(w), q) + 1);
    if (rho > registers_[idx]) registers_[idx] = rho;
  }

  void merge(const HyperLogLog& other) {
    if (other.p_ != p_ || other.seed_ != seed_)
      throw std::invalid_argument("cannot merge HyperLogLog sketches with different precision or seed");
    for (std::size_t i = 0; i < registers_.size(); ++i)
      registers_[i] = std::max(registers_[i], other.registers_[i]);
  }

  double estimate() const {
    const int q = 64 - p_;
    const double m = static_cast<double>(registers_.size());
    std::vector<std::uint32_t> hist(static_cast<std::size_t>(q) + 2, 0);
    for (auto r : registers_) ++hist[r];

    double z = m * tau(1.0 - hist[q + 1] / m);
    for (int k = q; k >= 1; --k) z = 0.5 * (z + hist[k]);
    z += m * sigma(hist[0] / m);
    constexpr double alpha_inf = 0.5 / std::numbers::ln2;
    return alpha_inf * m * m / z;
  }

  friend bool operator==(const HyperLogLog&, const HyperLogLog&) = default;

 private:
  int p_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> registers_;

  static double sigma(double x) {
    if (x == 1.0) return std::numeric_limits<double>::infinity();
    double y = 1.0;
    double z = x;
    double z_prev;
    do {
      x *= x;
      z_prev = z;
      z += x * y;
      y += y;
    } while (z != z_prev);
    return z;
  }

  static double tau(double x) {
    if (x == 0.0 || x == 1.0) return 0.0;
    double y = 1.0;
    double z = 1.0 - x;
    double z_prev;
    do {
      x = std::sqrt(x);
      z_prev = z;
      y *= 0.5;
      z -= (1.0 - x) * (1.0 - x) * y;
    } while (z != z_prev);
    return z / 3.0;
  }
};

}  // namespace lodcov
