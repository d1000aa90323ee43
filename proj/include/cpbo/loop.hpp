#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpbo/acquisition.hpp"
#include "cpbo/config.hpp"
#include "cpbo/graph.hpp"
#include "cpbo/rng.hpp"
#include "cpbo/sampling.hpp"
#include "cpbo/space.hpp"
#include "cpbo/ssl.hpp"
#include "cpbo/types.hpp"

namespace cpbo {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct IterationLog {
  Eigen::VectorXd x;
  double y = 0.0;
  double y_dagger = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  bool flat_landscape = false;
  double duration_s = 0.0;
  double prop_s = 0.0;           // graph build + propagation share
  Eigen::Index pool_index = -1;  // pool mode only
};

// Complete record of one optimization run: n_init initial rows followed by
// one row per iteration, plus the incumbent under the minimization
// convention.
struct RunRecord {
  RunConfig config;
  std::vector<IterationLog> iters;
  Eigen::VectorXd best_x;
  double best_y = std::numeric_limits<double>::infinity();
  bool pool_exhausted = false;

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(iters.size());
    for (const auto& it : iters) v.push_back(it.y);
    return v;
  }

  // best-so-far prefix minima
  std::vector<double> best_trace() const {
    std::vector<double> v;
    v.reserve(iters.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& it : iters) {
      best = std::min(best, it.y);
      v.push_back(best);
    }
    return v;
  }
};

namespace detail {

inline double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

inline Eigen::VectorXd uniform_point(const SearchSpace& space, Rng& rng) {
  Eigen::VectorXd x(space.dims());
  for (Eigen::Index k = 0; k < space.dims(); ++k)
    x[k] = rng.uniform(space.lower[k], space.upper[k]);
  return x;
}

inline Eigen::Index random_unevaluated(const PoolSet& pool, Rng& rng) {
  const std::vector<Eigen::Index> open = pool.unevaluated_indices();
  if (open.empty()) throw PoolExhausted("run: pool exhausted");
  return open[rng.index(open.size())];
}

}  // namespace detail

// One full optimization run (Algorithm 1 shape): initial design, then T
// rounds of threshold -> labels -> unlabeled points -> propagation ->
// acquisition maximization -> evaluation. The random stream is consumed in a
// fixed order per iteration: (1) unlabeled sampling or pool subsampling,
// (2) acquisition start points, (3) the acquisition tie-break. Identical
// config and seed therefore replay identical records.
inline RunRecord run(const RunConfig& config, const SearchSpace& space,
                     const ObjectiveFn& objective, const PoolSet* pool_in = nullptr) {
  config.validate();
  const bool pool_mode = config.scenario == Scenario::pool;
  if (pool_mode && pool_in == nullptr)
    throw std::invalid_argument("run: pool scenario requires a PoolSet");
  if (!pool_mode && pool_in != nullptr)
    throw std::invalid_argument("run: sampling scenario must not receive a PoolSet");

  PoolSet pool;
  if (pool_mode) {
    pool = *pool_in;
    pool.check_inside(space);
  }

  Rng rng = make_rng(config.seed);
  RunRecord rec;
  rec.config = config;
  History history;

  const auto evaluate = [&](const Eigen::VectorXd& x, IterationLog& log) {
    const double y = objective(x);
    if (std::isnan(y))
      throw std::runtime_error("run: objective returned NaN at evaluation " +
                               std::to_string(history.size() + 1));
    log.x = x;
    log.y = y;
    history.append(x, y);
    if (log.pool_index >= 0) pool.evaluated[static_cast<std::size_t>(log.pool_index)] = 1;
  };

  // initial design: uniform over the box, or uniform over unevaluated
  // candidates in pool mode
  for (int i = 0; i < config.n_init; ++i) {
    IterationLog log;
    const double t0 = detail::now_seconds();
    try {
      if (pool_mode) {
        log.pool_index = detail::random_unevaluated(pool, rng);
        evaluate(pool.candidates.row(log.pool_index).transpose(), log);
      } else {
        evaluate(detail::uniform_point(space, rng), log);
      }
    } catch (const PoolExhausted&) {
      rec.pool_exhausted = true;
      break;
    }
    log.duration_s = detail::now_seconds() - t0;
    rec.iters.push_back(std::move(log));
  }

  const bool is_random = config.classifier == Classifier::random_search;
  const bool is_control = config.classifier == Classifier::nadaraya_watson_control;
  const bool spreading = config.classifier == Classifier::label_spreading;

  for (int t = 0; t < config.iterations && !rec.pool_exhausted; ++t) {
    IterationLog log;
    const double t0 = detail::now_seconds();
    try {
      const std::vector<double>& values = history.values;
      log.y_dagger = compute_threshold(values, config.zeta);

      if (is_random) {
        if (pool_mode) {
          log.pool_index = detail::random_unevaluated(pool, rng);
          evaluate(pool.candidates.row(log.pool_index).transpose(), log);
        } else {
          evaluate(detail::uniform_point(space, rng), log);
        }
      } else if (history.size() < 2) {
        // cold start: the classifier needs at least two labeled points
        if (pool_mode) {
          log.pool_index = detail::random_unevaluated(pool, rng);
          evaluate(pool.candidates.row(log.pool_index).transpose(), log);
        } else {
          evaluate(detail::uniform_point(space, rng), log);
        }
      } else {
        const ClassLabels labels = assign_labels(values, log.y_dagger);
        const Eigen::MatrixXd X_l = history.matrix();

        // unlabeled points
        Eigen::MatrixXd X_u(0, space.dims());
        if (!is_control) {
          if (pool_mode) {
            PoolSet open;
            open.candidates.resize(pool.unevaluated_count(), space.dims());
            Eigen::Index r = 0;
            for (Eigen::Index i : pool.unevaluated_indices())
              open.candidates.row(r++) = pool.candidates.row(i);
            open.evaluated.assign(static_cast<std::size_t>(open.size()), 0);
            if (config.pool_subset && *config.pool_subset < open.size())
              open = subsample_pool(open, *config.pool_subset, rng);
            X_u = open.candidates;
          } else if (config.n_unlabeled > 0) {
            switch (config.sampler) {
              case SamplerKind::truncnorm:
                X_u = sample_unlabeled(history, space, config.n_unlabeled, rng,
                                       config.truncnorm_stddev);
                break;
              case SamplerKind::uniform:
                X_u = sample_uniform(space, config.n_unlabeled, rng);
                break;
              case SamplerKind::halton:
                X_u = halton(space, config.n_unlabeled);
                break;
              case SamplerKind::sobol:
                X_u = sobol(space, config.n_unlabeled);
                break;
            }
          }
        }

        // kernel width
        double beta = config.beta;
        if (config.learn_beta) {
          LearnBetaOptions lb;
          lb.classifier = spreading ? Classifier::label_spreading : Classifier::label_propagation;
          lb.alpha = config.alpha;
          lb.tau = config.max_prop_iters;
          lb.eps = config.prop_tol;
          lb.beta_init = config.beta;
          beta = learn_beta(X_l, labels, X_u, lb);
        }
        log.beta = beta;

        // graph + propagation
        const double p0 = detail::now_seconds();
        Eigen::MatrixXd X(X_l.rows() + X_u.rows(), space.dims());
        X.topRows(X_l.rows()) = X_l;
        if (X_u.rows() > 0) X.bottomRows(X_u.rows()) = X_u;
        const SimilarityGraph g = build_graph(X, beta);
        const PropagatedLabels chat =
            spreading ? propagate_ls(g, labels, config.alpha, config.max_prop_iters, config.prop_tol)
                      : propagate_lp(g, labels, config.max_prop_iters, config.prop_tol);
        log.prop_s = detail::now_seconds() - p0;

        const InductivePredictor predictor(X, chat, beta);

        AscentOptions ascent;
        ascent.max_steps = config.max_ascent_steps;
        ascent.stat_tol = config.ascent_tol;
        const AcquisitionOutcome outcome =
            pool_mode ? maximize_pool(predictor, pool, rng, config.tie_tol)
                      : maximize_continuous(predictor, space, config.n_starts, rng,
                                            config.tie_tol, ascent);
        log.flat_landscape = outcome.flat_landscape;
        log.pool_index = outcome.pool_index;
        evaluate(outcome.query, log);
      }
    } catch (const PoolExhausted&) {
      rec.pool_exhausted = true;
      break;
    }
    log.duration_s = detail::now_seconds() - t0;
    rec.iters.push_back(std::move(log));
  }

  for (const auto& it : rec.iters) {
    if (it.y < rec.best_y) {
      rec.best_y = it.y;
      rec.best_x = it.x;
    }
  }
  history.check_inside(space);
  return rec;
}

inline RunRecord run(const RunConfig& config, const SearchSpace& space,
                     const ObjectiveFn& objective, const PoolSet& pool) {
  return run(config, space, objective, &pool);
}

// Supervised control: the classifier sees no unlabeled points, which reduces
// the inductive model to the Nadaraya-Watson estimate over labeled data.
inline RunRecord run_control_nw(const RunConfig& config, const SearchSpace& space,
                                const ObjectiveFn& objective, const PoolSet* pool = nullptr) {
  RunConfig c = config;
  c.classifier = Classifier::nadaraya_watson_control;
  c.n_unlabeled = 0;
  return run(c, space, objective, pool);
}

}  // namespace cpbo
