#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpbo/rng.hpp"
#include "cpbo/space.hpp"
#include "cpbo/types.hpp"

namespace cpbo {

struct AcquisitionOutcome {
  Eigen::VectorXd query;
  Eigen::Index pool_index = -1;  // set in pool mode
  double value = 0.0;            // class-1 probability at the query
  bool flat_landscape = false;
  int starts_evaluated = 0;
};

struct PoolExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Threshold y-dagger splitting the observed values: the k-th smallest with
// k = max(1, ceil(zeta * t)), which guarantees at least one Class-1 point.
inline double compute_threshold(const std::vector<double>& values, double zeta) {
  if (values.empty()) throw std::invalid_argument("compute_threshold: no values");
  if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("compute_threshold: zeta in (0,1)");
  const std::size_t t = values.size();
  const std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(zeta * static_cast<double>(t))));
  std::vector<double> sorted(values);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  return sorted[k - 1];
}

// y <= y_dagger -> Class 1, else Class 0.
inline ClassLabels assign_labels(const std::vector<double>& values, double y_dagger) {
  std::vector<int> cls(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) cls[i] = values[i] <= y_dagger ? 1 : 0;
  ClassLabels labels(std::move(cls));
  if (labels.count(1) < 1)
    throw std::logic_error("assign_labels: threshold below every value");
  return labels;
}

struct AscentOptions {
  int max_steps = 200;
  double stat_tol = 1e-6;       // relative to the largest box width
  double fd_step = 1e-6;        // relative central-difference step
  double armijo_c = 1e-4;
  int max_backtracks = 45;
};

namespace detail {

inline void check_finite_value(double v) {
  if (std::isnan(v)) throw std::runtime_error("acquisition: predictor returned NaN");
}

// Projected gradient ascent with backtracking line search. Gradients come
// from central differences clipped to the box, so boundary coordinates fall
// back to one-sided differences automatically.
template <class F>
std::pair<Eigen::VectorXd, double> ascend_projected(F&& f, const SearchSpace& space,
                                                    Eigen::VectorXd x, const AscentOptions& opt) {
  const Eigen::Index d = space.dims();
  double fx = f(x);
  check_finite_value(fx);
  const double move_tol = opt.stat_tol * space.max_width();
  Eigen::VectorXd g(d), trial(d);
  for (int step = 0; step < opt.max_steps; ++step) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const double h = opt.fd_step * space.width(k);
      trial = x;
      trial[k] = std::min(x[k] + h, space.upper[k]);
      const double hi_x = trial[k];
      const double f_hi = f(trial);
      trial[k] = std::max(x[k] - h, space.lower[k]);
      const double lo_x = trial[k];
      const double f_lo = f(trial);
      check_finite_value(f_hi);
      check_finite_value(f_lo);
      g[k] = hi_x > lo_x ? (f_hi - f_lo) / (hi_x - lo_x) : 0.0;
    }
    const double gmax = g.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0)) break;  // flat to finite-difference resolution

    double t = space.max_width() / gmax;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      const Eigen::VectorXd xn = space.clamp(x + t * g);
      const Eigen::VectorXd dx = xn - x;
      if (dx.cwiseAbs().maxCoeff() <= 0.0) break;
      const double fn = f(xn);
      check_finite_value(fn);
      if (fn > fx + opt.armijo_c * g.dot(dx)) {
        const bool small_move = dx.cwiseAbs().maxCoeff() < move_tol;
        x = xn;
        fx = fn;
        accepted = true;
        if (small_move) return {x, fx};
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // line search exhausted: stationary within the box
  }
  return {x, fx};
}

}  // namespace detail

// Multi-start bounded ascent on the class-probability surface. Random draws
// happen in a fixed order: all start points first (start-major, dimension-
// minor), then a single tie-break index. If every terminal value agrees
// within tie_tol the landscape is flagged flat and a uniformly random
// terminal point is returned; otherwise ties within tie_tol of the best are
// broken uniformly.
template <class F>
AcquisitionOutcome maximize_continuous(F&& predictor, const SearchSpace& space, int n_starts,
                                       Rng& rng, double tie_tol = 1e-9,
                                       const AscentOptions& opt = {}) {
  if (n_starts < 1) throw std::invalid_argument("maximize_continuous: n_starts must be >= 1");
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(static_cast<std::size_t>(n_starts));
  for (int s = 0; s < n_starts; ++s) {
    Eigen::VectorXd x(space.dims());
    for (Eigen::Index k = 0; k < space.dims(); ++k)
      x[k] = rng.uniform(space.lower[k], space.upper[k]);
    starts.push_back(std::move(x));
  }

  std::vector<Eigen::VectorXd> terminals(starts.size());
  std::vector<double> values(starts.size());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    auto [x, fx] = detail::ascend_projected(predictor, space, starts[s], opt);
    terminals[s] = std::move(x);
    values[s] = fx;
  }

  const double best = *std::max_element(values.begin(), values.end());
  const double worst = *std::min_element(values.begin(), values.end());

  AcquisitionOutcome out;
  out.starts_evaluated = n_starts;
  out.flat_landscape = (best - worst) < tie_tol;
  std::size_t chosen;
  if (out.flat_landscape) {
    chosen = rng.index(terminals.size());
  } else {
    std::vector<std::size_t> ties;
    for (std::size_t s = 0; s < values.size(); ++s)
      if (values[s] >= best - tie_tol) ties.push_back(s);
    chosen = ties[rng.index(ties.size())];
  }
  out.query = terminals[chosen];
  out.value = values[chosen];
  return out;
}

// Argmax over the unevaluated pool candidates, same tie handling as the
// continuous mode. One tie-break draw at most.
template <class F>
AcquisitionOutcome maximize_pool(F&& predictor, const PoolSet& pool, Rng& rng,
                                 double tie_tol = 1e-9) {
  const std::vector<Eigen::Index> open = pool.unevaluated_indices();
  if (open.empty()) throw PoolExhausted("maximize_pool: no unevaluated candidates");

  std::vector<double> values(open.size());
  for (std::size_t i = 0; i < open.size(); ++i) {
    values[i] = predictor(Eigen::VectorXd(pool.candidates.row(open[i]).transpose()));
    detail::check_finite_value(values[i]);
  }
  const double best = *std::max_element(values.begin(), values.end());
  const double worst = *std::min_element(values.begin(), values.end());

  std::vector<std::size_t> ties;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= best - tie_tol) ties.push_back(i);
  const std::size_t chosen = ties[rng.index(ties.size())];

  AcquisitionOutcome out;
  out.starts_evaluated = static_cast<int>(open.size());
  out.flat_landscape = (best - worst) < tie_tol;
  out.pool_index = open[chosen];
  out.query = pool.candidates.row(out.pool_index).transpose();
  out.value = values[chosen];
  return out;
}

}  // namespace cpbo
