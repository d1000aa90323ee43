#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpbo/space.hpp"

namespace cpbo {

struct Benchmark {
  std::string name;
  SearchSpace space;
  std::function<double(const Eigen::VectorXd&)> objective;
  double known_optimum_value;
};

namespace detail {

inline void check_in_box(const Eigen::VectorXd& x, const SearchSpace& space, const char* name) {
  if (!space.contains(x))
    throw std::invalid_argument(std::string(name) + ": point outside the benchmark domain");
}

inline SearchSpace box2(double l1, double u1, double l2, double u2) {
  Eigen::VectorXd lo(2), hi(2);
  lo << l1, l2;
  hi << u1, u2;
  return SearchSpace(lo, hi);
}

}  // namespace detail

inline const SearchSpace& beale_space() {
  static const SearchSpace s = detail::box2(-4.5, 4.5, -4.5, 4.5);
  return s;
}

inline double beale(const Eigen::VectorXd& x) {
  detail::check_in_box(x, beale_space(), "beale");
  const double x1 = x[0], x2 = x[1];
  const double a = 1.5 - x1 + x1 * x2;
  const double b = 2.25 - x1 + x1 * x2 * x2;
  const double c = 2.625 - x1 + x1 * x2 * x2 * x2;
  return a * a + b * b + c * c;
}

inline const SearchSpace& branin_space() {
  static const SearchSpace s = detail::box2(-5.0, 10.0, 0.0, 15.0);
  return s;
}

inline double branin(const Eigen::VectorXd& x) {
  detail::check_in_box(x, branin_space(), "branin");
  const double pi = 3.14159265358979323846;
  const double x1 = x[0], x2 = x[1];
  const double t = x2 - 5.1 / (4.0 * pi * pi) * x1 * x1 + 5.0 / pi * x1 - 6.0;
  return t * t + 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(x1) + 10.0;
}

inline const SearchSpace& bukin6_space() {
  static const SearchSpace s = detail::box2(-15.0, -5.0, -3.0, 3.0);
  return s;
}

inline double bukin6(const Eigen::VectorXd& x) {
  detail::check_in_box(x, bukin6_space(), "bukin6");
  const double x1 = x[0], x2 = x[1];
  return 100.0 * std::sqrt(std::fabs(x2 - 0.01 * x1 * x1)) + 0.01 * std::fabs(x1 + 10.0);
}

inline const SearchSpace& sixhumpcamel_space() {
  static const SearchSpace s = detail::box2(-3.0, 3.0, -2.0, 2.0);
  return s;
}

inline double sixhumpcamel(const Eigen::VectorXd& x) {
  detail::check_in_box(x, sixhumpcamel_space(), "sixhumpcamel");
  const double x1 = x[0], x2 = x[1];
  const double x1sq = x1 * x1;
  const double x2sq = x2 * x2;
  return (4.0 - 2.1 * x1sq + x1sq * x1sq / 3.0) * x1sq + x1 * x2 + (-4.0 + 4.0 * x2sq) * x2sq;
}

inline const std::vector<Benchmark>& benchmarks() {
  static const std::vector<Benchmark> all = {
      {"beale", beale_space(), beale, 0.0},
      {"branin", branin_space(), branin, 0.3978873577297384},  // 10 / (8 pi)
      {"bukin6", bukin6_space(), bukin6, 0.0},
      {"sixhumpcamel", sixhumpcamel_space(), sixhumpcamel, -1.0316284534898774},
  };
  return all;
}

inline const Benchmark& find_benchmark(const std::string& name) {
  for (const auto& b : benchmarks())
    if (b.name == name) return b;
  throw std::invalid_argument("unknown benchmark: " + name);
}

// Best observed value minus the optimum. Tiny negative slack (the optimum is
// known to higher precision than the observations) is clipped to zero.
inline double simple_regret(const std::vector<double>& values, double f_star) {
  if (values.empty()) throw std::invalid_argument("simple_regret: no values");
  double best = values.front();
  for (double v : values) best = std::min(best, v);
  double r = best - f_star;
  if (r < 0.0 && r > -1e-9) {
    std::cerr << "simple_regret: clipping " << r << " to 0\n";
    r = 0.0;
  }
  return r;
}

}  // namespace cpbo
