#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cpbo/normal.hpp"
#include "cpbo/pool_csv.hpp"
#include "cpbo/rng.hpp"
#include "cpbo/sampling.hpp"

using namespace cpbo;

namespace {

// Test-side moment oracle from pdf/cdf identities; independent of the
// inverse-CDF path the sampler uses.
struct TruncMoments {
  double mean, var, mu4;
};

TruncMoments trunc_moments(double mu, double lo, double hi) {
  const double a = lo - mu, b = hi - mu;
  const double Z = normal_cdf(b) - normal_cdf(a);
  const double pa = normal_pdf(a), pb = normal_pdf(b);
  const double m1 = (pa - pb) / Z;
  const double m2 = 1.0 + (a * pa - b * pb) / Z;
  const double m3 = 2.0 * m1 + (a * a * pa - b * b * pb) / Z;
  const double m4 = 3.0 * m2 + (a * a * a * pa - b * b * b * pb) / Z;
  TruncMoments out;
  out.mean = mu + m1;
  out.var = m2 - m1 * m1;
  out.mu4 = m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1 * m1 * m1 * m1;
  return out;
}

double radical_inverse_oracle(std::uint64_t i, int base) {
  double out = 0.0, denom = 1.0;
  while (i > 0) {
    denom *= base;
    out += static_cast<double>(i % base) / denom;
    i /= static_cast<std::uint64_t>(base);
  }
  return out;
}

// star-discrepancy lower-bound estimate over the corner grid spanned by the
// point coordinates (same estimator for both point sets under comparison)
double star_discrepancy_2d(const Eigen::MatrixXd& P) {
  const Eigen::Index n = P.rows();
  std::vector<double> xs, ys;
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.push_back(P(i, 0));
    ys.push_back(P(i, 1));
  }
  xs.push_back(1.0);
  ys.push_back(1.0);
  double worst = 0.0;
  for (double cx : xs)
    for (double cy : ys) {
      int open = 0, closed = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool in_closed = P(i, 0) <= cx && P(i, 1) <= cy;
        const bool in_open = P(i, 0) < cx && P(i, 1) < cy;
        open += in_open;
        closed += in_closed;
      }
      const double area = cx * cy;
      worst = std::max(worst, std::abs(static_cast<double>(open) / n - area));
      worst = std::max(worst, std::abs(static_cast<double>(closed) / n - area));
    }
  return worst;
}

}  // namespace

TEST_CASE("normal_quantile: reference values across the full range") {
  REQUIRE(normal_quantile(0.5) == 0.0);
  REQUIRE_THAT(normal_quantile(0.025), Catch::Matchers::WithinAbs(-1.9599639845400545, 1e-12));
  REQUIRE_THAT(normal_quantile(0.2), Catch::Matchers::WithinAbs(-0.8416212335729142, 1e-12));
  REQUIRE_THAT(normal_quantile(0.7), Catch::Matchers::WithinAbs(0.5244005127080407, 1e-12));
  REQUIRE_THAT(normal_quantile(0.975), Catch::Matchers::WithinAbs(1.959963984540054, 1e-12));
  REQUIRE_THAT(normal_quantile(1e-10), Catch::Matchers::WithinAbs(-6.361340902404056, 1e-10));
  REQUIRE_THAT(normal_quantile(1e-20), Catch::Matchers::WithinAbs(-9.262340089798409, 1e-10));
  REQUIRE_THAT(normal_quantile(1e-100), Catch::Matchers::WithinAbs(-21.273453560965322, 1e-9));
  REQUIRE_THAT(normal_quantile(1e-300), Catch::Matchers::WithinAbs(-37.0470962993612, 1e-9));
  REQUIRE_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
  // round trip against the cdf
  for (double x : {-8.0, -3.2, -0.7, 0.0, 1.1, 4.5, 7.9})
    REQUIRE_THAT(normal_quantile(normal_cdf(x)), Catch::Matchers::WithinAbs(x, 1e-9));
}

TEST_CASE("sample_truncnorm_1d: moments match the analytic oracle at 1e5 draws") {
  const int n = 100000;
  for (double mu : {0.0, 2.0, -2.0}) {
    Rng rng(101);
    const TruncMoments want = trunc_moments(mu, -1.0, 1.0);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_truncnorm_1d(mu, -1.0, 1.0, rng);
      REQUIRE(x >= -1.0);
      REQUIRE(x <= 1.0);
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double se_mean = std::sqrt(want.var / n);
    const double se_var = std::sqrt((want.mu4 - want.var * want.var) / n);
    CAPTURE(mu, mean, want.mean, var, want.var);
    REQUIRE(std::abs(mean - want.mean) <= 3.0 * se_mean);
    REQUIRE(std::abs(var - want.var) <= 3.0 * se_var);
  }
}

TEST_CASE("sample_truncnorm_1d: symmetric bounds center the mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_truncnorm_1d(0.0, -1.0, 1.0, rng);
  const double se = std::sqrt(trunc_moments(0.0, -1.0, 1.0).var / n);
  REQUIRE(std::abs(sum / n) <= 3.0 * se);
}

TEST_CASE("sample_truncnorm_1d: far-tail interval with negligible mass errors out") {
  Rng rng(1);
  REQUIRE_THROWS_AS(sample_truncnorm_1d(0.0, 50.0, 51.0, rng), std::runtime_error);
  REQUIRE_THROWS_AS(sample_truncnorm_1d(0.0, -51.0, -50.0, rng), std::runtime_error);
  // moderately far tails still work and stay inside
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_truncnorm_1d(0.0, 8.0, 9.0, rng);
    REQUIRE(x >= 8.0);
    REQUIRE(x <= 9.0);
  }
  REQUIRE_THROWS_AS(sample_truncnorm_1d(0.0, 1.0, 1.0, rng), std::invalid_argument);
}

TEST_CASE("sample_unlabeled: count allocation and truncation") {
  const SearchSpace space = SearchSpace::unit_cube(2);
  History h;
  for (double c : {0.1, 0.5, 0.9}) {
    Eigen::VectorXd p(2);
    p << c, c;
    h.append(p, 0.0);
  }
  Rng rng(3);
  const Eigen::MatrixXd U = sample_unlabeled(h, space, 10, rng, 1e-4);
  REQUIRE(U.rows() == 10);
  // tiny sigma keeps each draw glued to its center: counts must be (4,3,3)
  std::vector<int> counts(3, 0);
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    int nearest = 0;
    double best = 1e300;
    for (int c = 0; c < 3; ++c) {
      const double dist = (U.row(i).transpose() - h.points[static_cast<std::size_t>(c)]).norm();
      if (dist < best) {
        best = dist;
        nearest = c;
      }
    }
    ++counts[static_cast<std::size_t>(nearest)];
  }
  REQUIRE(counts == std::vector<int>{4, 3, 3});

  Rng rng2(4);
  History h5;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd p(2);
    p << 0.2 * i + 0.1, 0.5;
    h5.append(p, 0.0);
  }
  const Eigen::MatrixXd U5 = sample_unlabeled(h5, space, 100, rng2);
  REQUIRE(U5.rows() == 100);
  for (Eigen::Index i = 0; i < U5.rows(); ++i)
    REQUIRE(space.contains(U5.row(i).transpose()));
}

TEST_CASE("sample_uniform: box moments and seed sensitivity") {
  Eigen::VectorXd lo(2), hi(2);
  lo << -2.0, 1.0;
  hi << 2.0, 5.0;
  const SearchSpace space(lo, hi);
  Rng rng(9);
  const int n = 100000;
  const Eigen::MatrixXd U = sample_uniform(space, n, rng);
  for (Eigen::Index k = 0; k < 2; ++k) {
    const double mean = U.col(k).mean();
    const double mid = 0.5 * (lo[k] + hi[k]);
    const double se = space.width(k) / std::sqrt(12.0 * n);
    REQUIRE(std::abs(mean - mid) <= 3.0 * se);
    REQUIRE(U.col(k).minCoeff() >= lo[k]);
    REQUIRE(U.col(k).maxCoeff() <= hi[k]);
  }
  Rng ra(1), rb(2);
  REQUIRE(sample_uniform(space, 4, ra) != sample_uniform(space, 4, rb));
}

TEST_CASE("halton: radical-inverse oracle and hand values") {
  const SearchSpace unit = SearchSpace::unit_cube(2);
  const Eigen::MatrixXd H = halton(unit, 8);
  const double want0[] = {1.0 / 2, 1.0 / 4, 3.0 / 4, 1.0 / 8, 5.0 / 8, 3.0 / 8, 7.0 / 8, 1.0 / 16};
  const double want1[] = {1.0 / 3, 2.0 / 3, 1.0 / 9, 4.0 / 9, 7.0 / 9, 2.0 / 9, 5.0 / 9, 8.0 / 9};
  for (int i = 0; i < 8; ++i) {
    REQUIRE_THAT(H(i, 0), Catch::Matchers::WithinAbs(want0[i], 1e-15));
    REQUIRE_THAT(H(i, 1), Catch::Matchers::WithinAbs(want1[i], 1e-15));
    REQUIRE_THAT(H(i, 0), Catch::Matchers::WithinAbs(radical_inverse_oracle(i + 1, 2), 1e-15));
    REQUIRE_THAT(H(i, 1), Catch::Matchers::WithinAbs(radical_inverse_oracle(i + 1, 3), 1e-15));
  }
  REQUIRE(halton(unit, 8) == H);  // deterministic

  Eigen::VectorXd lo(3), hi(3);
  lo << -1.0, 0.0, 10.0;
  hi << 1.0, 4.0, 11.0;
  const SearchSpace box(lo, hi);
  const Eigen::MatrixXd Hm = halton(box, 64);
  for (Eigen::Index i = 0; i < Hm.rows(); ++i) REQUIRE(box.contains(Hm.row(i).transpose()));
}

TEST_CASE("sobol: 1-D hand values, 64-D reference points, determinism") {
  const SearchSpace unit1 = SearchSpace::unit_cube(1);
  const Eigen::MatrixXd S1 = sobol(unit1, 8);
  const double want[] = {0.0, 0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125};
  for (int i = 0; i < 8; ++i) REQUIRE(S1(i, 0) == want[i]);

  const SearchSpace unit2 = SearchSpace::unit_cube(2);
  const Eigen::MatrixXd S2 = sobol(unit2, 8);
  const double want2[] = {0.0, 0.5, 0.25, 0.75, 0.375, 0.875, 0.125, 0.625};
  for (int i = 0; i < 8; ++i) {
    REQUIRE(S2(i, 0) == want[i]);
    REQUIRE(S2(i, 1) == want2[i]);
  }

  // reference points from an independent implementation of the same
  // direction-number table (64 dimensions, Gray-code order)
  const SearchSpace unit64 = SearchSpace::unit_cube(64);
  const Eigen::MatrixXd S64 = sobol(unit64, 256);
  const double ref100[] = {0.4140625, 0.2578125, 0.7734375, 0.7265625, 0.8828125, 0.7421875};
  for (int k = 0; k < 6; ++k) REQUIRE(S64(100, k) == ref100[k]);
  const double ref255[] = {0.53515625, 0.87109375, 0.09765625, 0.33984375};
  for (int k = 0; k < 4; ++k) REQUIRE(S64(255, 60 + k) == ref255[k]);

  REQUIRE(sobol(unit64, 256) == S64);
  REQUIRE_THROWS_AS(sobol(SearchSpace::unit_cube(65), 4), std::invalid_argument);
}

TEST_CASE("sobol: lower star discrepancy than uniform sampling, majority vote") {
  const SearchSpace unit2 = SearchSpace::unit_cube(2);
  const double d_sobol = star_discrepancy_2d(sobol(unit2, 256));
  int sobol_wins = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(1000 + static_cast<std::uint64_t>(trial));
    const double d_unif = star_discrepancy_2d(sample_uniform(unit2, 256, rng));
    sobol_wins += d_sobol < d_unif;
  }
  REQUIRE(sobol_wins > 10);
}

TEST_CASE("subsample_pool: permutation, multinomial uniformity, mask preserved") {
  Eigen::MatrixXd cand(3, 1);
  cand << 0.0, 1.0, 2.0;
  PoolSet pool(cand);
  pool.evaluated[1] = 1;

  Rng rng(5);
  const PoolSet whole = subsample_pool(pool, 3, rng);
  REQUIRE(whole.size() == 3);
  std::vector<double> got;
  for (Eigen::Index i = 0; i < 3; ++i) got.push_back(whole.candidates(i, 0));
  std::sort(got.begin(), got.end());
  REQUIRE(got == std::vector<double>{0.0, 1.0, 2.0});
  // the evaluated flag follows candidate 1 wherever it lands
  for (Eigen::Index i = 0; i < 3; ++i)
    REQUIRE(static_cast<bool>(whole.evaluated[static_cast<std::size_t>(i)]) ==
            (whole.candidates(i, 0) == 1.0));

  const PoolSet over = subsample_pool(pool, 7, rng);  // larger than the pool: take everything
  REQUIRE(over.size() == 3);

  const int trials = 30000;
  std::vector<int> hits(3, 0);
  for (int t = 0; t < trials; ++t) {
    const PoolSet one = subsample_pool(pool, 1, rng);
    ++hits[static_cast<std::size_t>(one.candidates(0, 0))];
  }
  const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / trials);
  for (int c = 0; c < 3; ++c)
    REQUIRE(std::abs(hits[static_cast<std::size_t>(c)] / static_cast<double>(trials) - 1.0 / 3) <=
            3.0 * se);
}

TEST_CASE("pool CSV: load, validate, and line-numbered failures") {
  namespace fs = std::filesystem;
  const std::string good = (fs::temp_directory_path() / "cpbo_pool_good.csv").string();
  {
    std::ofstream out(good);
    out << "x1,x2,y\n0.0,0.5,3.25\n1.0,0.25,-1.5\n0.5,1.0,0.0\n";
  }
  const PoolCsv csv = load_pool_csv(good);
  REQUIRE(csv.X.rows() == 3);
  REQUIRE(csv.X.cols() == 2);
  REQUIRE(csv.y[1] == -1.5);
  REQUIRE(csv.min_value() == -1.5);
  REQUIRE(csv.feature_names == std::vector<std::string>{"x1", "x2"});
  REQUIRE(csv.value_name == "y");

  const SearchSpace box = SearchSpace::unit_cube(2);
  REQUIRE_NOTHROW(validate_pool_bounds(csv, box, good));
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.2, 0.0;
  hi << 1.0, 1.0;
  REQUIRE_THROWS_WITH(validate_pool_bounds(csv, SearchSpace(lo, hi), good),
                      Catch::Matchers::ContainsSubstring("line 2"));

  const std::string nan_csv = (fs::temp_directory_path() / "cpbo_pool_nan.csv").string();
  {
    std::ofstream out(nan_csv);
    out << "x1,y\n0.0,1.0\nnan,2.0\n";
  }
  REQUIRE_THROWS_WITH(load_pool_csv(nan_csv), Catch::Matchers::ContainsSubstring("line 3"));

  const std::string ragged = (fs::temp_directory_path() / "cpbo_pool_ragged.csv").string();
  {
    std::ofstream out(ragged);
    out << "x1,x2,y\n0.0,0.5\n";
  }
  REQUIRE_THROWS_WITH(load_pool_csv(ragged), Catch::Matchers::ContainsSubstring("line 2"));

  const std::string junk = (fs::temp_directory_path() / "cpbo_pool_junk.csv").string();
  {
    std::ofstream out(junk);
    out << "x1,y\nhello,2.0\n";
  }
  REQUIRE_THROWS_WITH(load_pool_csv(junk), Catch::Matchers::ContainsSubstring("line 2"));

  for (const auto& p : {good, nan_csv, ragged, junk}) std::remove(p.c_str());
}

TEST_CASE("pool bounding box pads degenerate columns") {
  PoolCsv csv;
  csv.X.resize(2, 2);
  csv.X << 0.0, 5.0, 1.0, 5.0;
  csv.y.resize(2);
  csv.y << 0.0, 1.0;
  const SearchSpace box = pool_bounding_box(csv);
  REQUIRE(box.lower[0] == 0.0);
  REQUIRE(box.upper[0] == 1.0);
  REQUIRE(box.lower[1] < 5.0);
  REQUIRE(box.upper[1] > 5.0);
}
