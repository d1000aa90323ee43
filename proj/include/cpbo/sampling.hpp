#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "cpbo/normal.hpp"
#include "cpbo/rng.hpp"
#include "cpbo/sobol_table.hpp"
#include "cpbo/space.hpp"
#include "cpbo/types.hpp"

namespace cpbo {

// One draw from a normal with mean mu and standard deviation sigma truncated
// to [lo, hi], by inverse-CDF transform of a single uniform draw. With an
// identity covariance and an axis-aligned box the multivariate truncated
// normal factorizes into these one-dimensional draws exactly. When both
// bounds sit in the same tail the complementary CDF is used so the transform
// stays accurate far from the mean.
inline double sample_truncnorm_1d(double mu, double lo, double hi, Rng& rng,
                                  double sigma = 1.0) {
  if (!(lo < hi)) throw std::invalid_argument("sample_truncnorm_1d: requires lo < hi");
  if (!(sigma > 0.0)) throw std::invalid_argument("sample_truncnorm_1d: sigma must be > 0");
  if (!std::isfinite(mu)) throw std::invalid_argument("sample_truncnorm_1d: nonfinite mean");
  const double a = (lo - mu) / sigma;
  const double b = (hi - mu) / sigma;
  const double u = rng.uniform01();
  double z;
  if (a >= 0.0) {
    // both bounds at or right of the mean: work in the upper tail
    const double pa = normal_ccdf(a);
    const double pb = normal_ccdf(b);
    if (!(pa - pb >= 1e-300))
      throw std::runtime_error("sample_truncnorm_1d: interval mass underflow (right tail)");
    z = -normal_quantile(pb + u * (pa - pb));
  } else if (b <= 0.0) {
    const double pa = normal_cdf(a);
    const double pb = normal_cdf(b);
    if (!(pb - pa >= 1e-300))
      throw std::runtime_error("sample_truncnorm_1d: interval mass underflow (left tail)");
    z = normal_quantile(pa + u * (pb - pa));
  } else {
    const double pa = normal_cdf(a);
    const double pb = normal_cdf(b);
    z = normal_quantile(pa + u * (pb - pa));
  }
  const double x = mu + sigma * z;
  return std::min(std::max(x, lo), hi);
}

// Unlabeled points around the labeled ones: floor(n_u / n_l) draws per
// history point, one extra for the first n_u mod n_l of them. Draw order is
// centers in history order, dimensions in index order.
inline Eigen::MatrixXd sample_unlabeled(const History& history, const SearchSpace& space,
                                        Eigen::Index n_u, Rng& rng, double sigma = 1.0) {
  const Eigen::Index n_l = static_cast<Eigen::Index>(history.size());
  if (n_l < 1) throw std::invalid_argument("sample_unlabeled: empty history");
  if (n_u <= 0) throw std::invalid_argument("sample_unlabeled: n_u must be positive");
  const Eigen::Index d = space.dims();
  Eigen::MatrixXd out(n_u, d);
  const Eigen::Index base = n_u / n_l;
  const Eigen::Index extra = n_u % n_l;
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < n_l; ++c) {
    const Eigen::Index count = base + (c < extra ? 1 : 0);
    for (Eigen::Index i = 0; i < count; ++i, ++row)
      for (Eigen::Index k = 0; k < d; ++k)
        out(row, k) = sample_truncnorm_1d(history.points[static_cast<std::size_t>(c)][k],
                                          space.lower[k], space.upper[k], rng, sigma);
  }
  return out;
}

inline Eigen::MatrixXd sample_uniform(const SearchSpace& space, Eigen::Index n, Rng& rng) {
  Eigen::MatrixXd out(n, space.dims());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < space.dims(); ++k)
      out(i, k) = rng.uniform(space.lower[k], space.upper[k]);
  return out;
}

namespace detail {

inline std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int v = 2; static_cast<int>(primes.size()) < count; ++v) {
    bool is_prime = true;
    for (int p : primes) {
      if (p * p > v) break;
      if (v % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(v);
  }
  return primes;
}

inline double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double place = inv;
  double out = 0.0;
  while (i > 0) {
    out += static_cast<double>(i % static_cast<std::uint64_t>(base)) * place;
    i /= static_cast<std::uint64_t>(base);
    place *= inv;
  }
  return out;
}

}  // namespace detail

// Halton sequence with the first d primes as bases, unsrambled, starting at
// index 1 (the first nonzero point), affinely mapped to the box.
inline Eigen::MatrixXd halton(const SearchSpace& space, Eigen::Index n) {
  const Eigen::Index d = space.dims();
  const std::vector<int> bases = detail::first_primes(static_cast<int>(d));
  Eigen::MatrixXd out(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < d; ++k) {
      const double u = detail::radical_inverse(static_cast<std::uint64_t>(i) + 1, bases[k]);
      out(i, k) = space.lower[k] + u * space.width(k);
    }
  return out;
}

// Sobol' sequence in Gray-code order (origin included), direction numbers
// from the embedded 64-dimension Joe-Kuo table, mapped to the box.
inline Eigen::MatrixXd sobol(const SearchSpace& space, Eigen::Index n) {
  const Eigen::Index d = space.dims();
  if (d > detail::kSobolMaxDims)
    throw std::invalid_argument("sobol: dimension exceeds the direction-number table (64)");
  constexpr int kBits = 52;  // keep exact in a double mantissa

  // direction integers V[j][k] = m_k * 2^(kBits - k), k = 1..kBits
  std::vector<std::array<std::uint64_t, kBits + 1>> V(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::array<std::uint64_t, kBits + 1> m{};
    const auto& dim = detail::kSobolDims[static_cast<std::size_t>(j)];
    if (j == 0) {
      for (int k = 1; k <= kBits; ++k) m[k] = 1;
    } else {
      const int s = dim.degree;
      for (int k = 1; k <= s; ++k) m[k] = dim.m[static_cast<std::size_t>(k - 1)];
      for (int k = s + 1; k <= kBits; ++k) {
        std::uint64_t v = m[k - s] ^ (m[k - s] << s);
        for (int i = 1; i < s; ++i)
          if ((dim.poly >> (s - i)) & 1u) v ^= m[k - i] << i;
        m[k] = v;
      }
    }
    for (int k = 1; k <= kBits; ++k)
      V[static_cast<std::size_t>(j)][k] = m[k] << (kBits - k);
  }

  Eigen::MatrixXd out(n, d);
  std::vector<std::uint64_t> x(static_cast<std::size_t>(d), 0);
  const double scale = 0x1.0p-52;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k)
      out(i, k) = space.lower[k] +
                  static_cast<double>(x[static_cast<std::size_t>(k)]) * scale * space.width(k);
    // lowest zero bit of i selects the direction number to flip
    int c = 1;
    for (std::uint64_t ii = static_cast<std::uint64_t>(i); ii & 1u; ii >>= 1) ++c;
    for (Eigen::Index k = 0; k < d; ++k)
      x[static_cast<std::size_t>(k)] ^= V[static_cast<std::size_t>(k)][c];
  }
  return out;
}

// Uniform without-replacement subset of m candidates; the evaluated mask
// travels with each candidate. Asking for more than the pool holds returns
// the whole pool.
inline PoolSet subsample_pool(const PoolSet& pool, Eigen::Index m, Rng& rng) {
  if (m <= 0) throw std::invalid_argument("subsample_pool: m must be positive");
  const Eigen::Index size = pool.size();
  if (m > size) {
    std::cerr << "subsample_pool: requested " << m << " of " << size
              << " candidates; taking the whole pool\n";
    m = size;
  }
  const std::vector<std::size_t> pick =
      rng.sample_without_replacement(static_cast<std::size_t>(size), static_cast<std::size_t>(m));
  PoolSet out;
  out.candidates.resize(m, pool.candidates.cols());
  out.evaluated.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    out.candidates.row(i) = pool.candidates.row(static_cast<Eigen::Index>(pick[static_cast<std::size_t>(i)]));
    out.evaluated[static_cast<std::size_t>(i)] = pool.evaluated[pick[static_cast<std::size_t>(i)]];
  }
  return out;
}

}  // namespace cpbo
