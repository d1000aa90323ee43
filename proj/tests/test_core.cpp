#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "cpbo/config.hpp"
#include "cpbo/rng.hpp"
#include "cpbo/space.hpp"
#include "cpbo/types.hpp"

using namespace cpbo;

TEST_CASE("rng: identical seeds replay identical draws") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) REQUIRE(a.uniform01() == b.uniform01());
}

TEST_CASE("rng: different seeds diverge") {
  Rng a(7), b(8);
  bool differ = false;
  for (int i = 0; i < 100; ++i) differ |= (a.uniform01() != b.uniform01());
  REQUIRE(differ);
}

TEST_CASE("rng: uniform01 in [0,1), index unbiased edge cases") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  REQUIRE(rng.index(1) == 0);
  for (int i = 0; i < 100; ++i) REQUIRE(rng.index(3) < 3);
}

TEST_CASE("rng: sample_without_replacement is a prefix permutation") {
  Rng rng(5);
  auto idx = rng.sample_without_replacement(10, 10);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 10; ++i) REQUIRE(idx[i] == i);
  auto sub = rng.sample_without_replacement(10, 4);
  REQUIRE(sub.size() == 4);
  std::sort(sub.begin(), sub.end());
  REQUIRE(std::adjacent_find(sub.begin(), sub.end()) == sub.end());
}

TEST_CASE("search space: containment and validation") {
  Eigen::VectorXd lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 1.0, 2.0;
  SearchSpace s(lo, hi);
  Eigen::VectorXd x(2);
  x << 0.0, 1.0;
  REQUIRE(s.contains(x));
  x << -1.0, 2.0;  // closed box includes the boundary
  REQUIRE(s.contains(x));
  x << -1.00001, 1.0;
  REQUIRE_FALSE(s.contains(x));

  REQUIRE_THROWS_AS(SearchSpace(hi, lo), std::invalid_argument);
  Eigen::VectorXd same(1);
  same << 3.0;
  REQUIRE_THROWS_AS(SearchSpace(same, same), std::invalid_argument);
}

TEST_CASE("class labels: one-hot rows and validation") {
  ClassLabels labels({1, 0, 1});
  const Eigen::MatrixXd C = labels.onehot();
  REQUIRE(C.rows() == 3);
  REQUIRE(C(0, 1) == 1.0);
  REQUIRE(C(1, 0) == 1.0);
  REQUIRE(C.rowwise().sum().isOnes());
  REQUIRE(labels.count(1) == 2);
  REQUIRE_THROWS_AS(ClassLabels({2}), std::invalid_argument);
}

TEST_CASE("config: validation rejects out-of-range fields") {
  RunConfig c;
  REQUIRE_NOTHROW(c.validate());
  c.zeta = 0.0;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c.zeta = 1.0;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.alpha = 1.0;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.n_unlabeled = -1;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.pool_subset = 0;
  REQUIRE_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("config: file round-trip compares equal field by field") {
  RunConfig c;
  c.zeta = 0.41;
  c.scenario = Scenario::pool;
  c.classifier = Classifier::label_spreading;
  c.n_unlabeled = 77;
  c.pool_subset = 123;
  c.alpha = 0.9;
  c.learn_beta = false;
  c.beta = 1.25e-3;
  c.max_prop_iters = 321;
  c.prop_tol = 3.5e-9;
  c.n_starts = 17;
  c.iterations = 9;
  c.n_init = 4;
  c.seed = 99;
  c.sampler = SamplerKind::sobol;
  c.truncnorm_stddev = 0.75;
  c.tie_tol = 1e-8;

  const std::string path =
      (std::filesystem::temp_directory_path() / "cpbo_cfg_roundtrip.ini").string();
  write_config_file(c, path);
  const RunConfig back = read_config_file(path);
  REQUIRE(back == c);
  std::remove(path.c_str());
}

TEST_CASE("config: reader rejects junk with line numbers") {
  const std::string path = (std::filesystem::temp_directory_path() / "cpbo_cfg_bad.ini").string();
  {
    std::ofstream out(path);
    out << "# comment\nzeta=0.3\nnot a pair\n";
  }
  REQUIRE_THROWS_WITH(read_config_file(path), Catch::Matchers::ContainsSubstring("line 3"));
  std::remove(path.c_str());
}
