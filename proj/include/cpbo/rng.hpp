#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace cpbo {

// Seeded random stream. A run owns exactly one Rng; submodules draw from it
// in the order documented in loop.hpp so that identical seeds replay
// identical trajectories. Doubles are derived from raw 64-bit words rather
// than std::uniform_real_distribution, which keeps the stream independent of
// the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Unbiased integer in [0, n). n == 1 consumes no draw.
  std::size_t index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = gen_();
      if (rem == 0 || r < max - rem + 1) return static_cast<std::size_t>(r % n);
    }
  }

  // First m entries of a partial Fisher-Yates pass over 0..n-1.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (m > n) m = n;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + index(n - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    return idx;
  }

 private:
  std::mt19937_64 gen_;
};

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace cpbo
