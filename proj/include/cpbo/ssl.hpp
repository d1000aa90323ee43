#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "cpbo/config.hpp"
#include "cpbo/graph.hpp"
#include "cpbo/types.hpp"

namespace cpbo {

// Soft labels over the n_l labeled rows followed by n_u unlabeled rows.
struct PropagatedLabels {
  Eigen::MatrixXd rows;  // (n_l + n_u) x 2
  Eigen::Index n_l = 0;

  Eigen::Index n() const { return rows.rows(); }
};

// Raised by the closed-form oracles when the linear system cannot be solved;
// callers (tests) skip rather than silently pass.
struct OracleUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PropagationStats {
  int iterations = 0;
  std::vector<double> deltas;  // max-abs change per iteration
};

inline PropagatedLabels init_labels(const ClassLabels& labels, Eigen::Index n_u) {
  const Eigen::Index n_l = static_cast<Eigen::Index>(labels.size());
  PropagatedLabels out;
  out.n_l = n_l;
  out.rows = Eigen::MatrixXd::Zero(n_l + n_u, 2);
  out.rows.topRows(n_l) = labels.onehot();
  return out;
}

namespace detail {

// Scale every row with positive sum to sum 1; all-zero rows are left alone
// (normalizing them is undefined).
inline void normalize_rows_inplace(Eigen::MatrixXd& C) {
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    const double s = C.row(i).sum();
    if (s > 0.0) C.row(i) /= s;
  }
}

}  // namespace detail

// Label propagation: multiply by the row-stochastic operator, clamp labeled
// rows to their one-hot labels, normalize, until the max-abs change drops
// below eps or tau iterations elapse.
inline PropagatedLabels propagate_lp(const SimilarityGraph& g, const ClassLabels& labels,
                                     int tau, double eps, PropagationStats* stats = nullptr) {
  const Eigen::Index n_l = static_cast<Eigen::Index>(labels.size());
  if (n_l < 1) throw std::invalid_argument("propagate_lp: need at least one labeled point");
  const Eigen::Index n_u = g.n() - n_l;
  if (n_u < 0) throw std::invalid_argument("propagate_lp: graph smaller than label set");

  const Eigen::MatrixXd onehot = labels.onehot();
  PropagatedLabels c = init_labels(labels, n_u);
  if (n_u == 0) {
    c.rows = onehot;  // one clamp, nothing to propagate
    if (stats) stats->iterations = 0;
    return c;
  }
  const Eigen::MatrixXd M = row_stochastic_propagator(g);
  Eigen::MatrixXd next;
  for (int it = 0; it < tau; ++it) {
    next.noalias() = M * c.rows;
    next.topRows(n_l) = onehot;
    detail::normalize_rows_inplace(next);
    const double delta = (next - c.rows).cwiseAbs().maxCoeff();
    c.rows.swap(next);
    if (stats) {
      ++stats->iterations;
      stats->deltas.push_back(delta);
    }
    if (delta < eps) break;
  }
  c.rows.topRows(n_l) = onehot;
  return c;
}

// Label spreading: iterate C <- alpha * S * C + (1 - alpha) * C0 with the
// symmetric operator S, then normalize rows once at return. Normalizing every
// iteration would push the iteration to a different fixed point than the
// (1 - alpha)(I - alpha S)^{-1} C0 solution this routine is checked against,
// so normalization is deferred to the end.
inline PropagatedLabels propagate_ls(const SimilarityGraph& g, const ClassLabels& labels,
                                     double alpha, int tau, double eps,
                                     PropagationStats* stats = nullptr) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("propagate_ls: alpha in (0,1)");
  const Eigen::Index n_l = static_cast<Eigen::Index>(labels.size());
  if (n_l < 1) throw std::invalid_argument("propagate_ls: need at least one labeled point");
  const Eigen::Index n_u = g.n() - n_l;
  if (n_u < 0) throw std::invalid_argument("propagate_ls: graph smaller than label set");

  const PropagatedLabels c0 = init_labels(labels, n_u);
  const Eigen::MatrixXd S = symmetric_propagator(g);  // precomputed once
  PropagatedLabels c = c0;
  Eigen::MatrixXd next;
  for (int it = 0; it < tau; ++it) {
    next.noalias() = alpha * (S * c.rows);
    next += (1.0 - alpha) * c0.rows;
    const double delta = (next - c.rows).cwiseAbs().maxCoeff();
    c.rows.swap(next);
    if (stats) {
      ++stats->iterations;
      stats->deltas.push_back(delta);
    }
    if (delta < eps) break;
  }
  detail::normalize_rows_inplace(c.rows);
  return c;
}

// Fixed point of the propagation recursion by direct linear solve:
// C_u = (I - M_uu)^{-1} M_ul C_l, labeled rows kept, then row-normalized.
inline PropagatedLabels lp_closed_form(const SimilarityGraph& g, const ClassLabels& labels) {
  const Eigen::Index n_l = static_cast<Eigen::Index>(labels.size());
  const Eigen::Index n_u = g.n() - n_l;
  const Eigen::MatrixXd onehot = labels.onehot();
  PropagatedLabels c;
  c.n_l = n_l;
  if (n_u == 0) {
    c.rows = onehot;
    return c;
  }
  const Eigen::MatrixXd M = row_stochastic_propagator(g);
  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(n_u, n_u) - M.bottomRightCorner(n_u, n_u);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw OracleUnavailable("lp_closed_form: I - M_uu is singular");
  c.rows.resize(n_l + n_u, 2);
  c.rows.topRows(n_l) = onehot;
  c.rows.bottomRows(n_u) = lu.solve(M.bottomLeftCorner(n_u, n_l) * onehot);
  detail::normalize_rows_inplace(c.rows);
  return c;
}

// Fixed point C* = (1 - alpha)(I - alpha S)^{-1} C0, then row-normalized.
inline PropagatedLabels ls_closed_form(const SimilarityGraph& g, const ClassLabels& labels,
                                       double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ls_closed_form: alpha in (0,1)");
  const Eigen::Index n_l = static_cast<Eigen::Index>(labels.size());
  const Eigen::Index n_u = g.n() - n_l;
  const PropagatedLabels c0 = init_labels(labels, n_u);
  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(g.n(), g.n()) - alpha * symmetric_propagator(g);
  PropagatedLabels c;
  c.n_l = n_l;
  c.rows = (1.0 - alpha) * A.partialPivLu().solve(c0.rows);
  detail::normalize_rows_inplace(c.rows);
  return c;
}

// Natural-log row entropy summed over all rows, with 0 log 0 = 0.
inline double entropy(const PropagatedLabels& c) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < c.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double p = c.rows(i, j);
      if (p < 0.0) throw std::invalid_argument("entropy: negative entry");
      if (p > 0.0) h -= p * std::log(p);
    }
  }
  return h;
}

struct LearnBetaOptions {
  Classifier classifier = Classifier::label_propagation;
  double alpha = 0.2;
  int tau = 1000;
  double eps = 1e-6;
  double beta_lo = 1e-3;
  double beta_hi = 1e3;
  double beta_init = 0.5;
  int max_iters = 60;
  double log_step_tol = 1e-3;
};

// Entropy-minimizing kernel width. Deterministic derivative-free descent on
// log(beta): move to whichever neighbor beta*e^s or beta*e^-s improves the
// entropy, otherwise halve the step, until the step underflows the tolerance.
// A flat objective therefore returns the initial value unchanged, and the
// result never has higher entropy than beta_init.
inline double learn_beta(const Eigen::MatrixXd& X_l, const ClassLabels& labels,
                         const Eigen::MatrixXd& X_u, const LearnBetaOptions& opt) {
  const Eigen::Index n_l = X_l.rows();
  const Eigen::Index n_u = X_u.rows();
  Eigen::MatrixXd X(n_l + n_u, X_l.cols());
  X.topRows(n_l) = X_l;
  if (n_u > 0) X.bottomRows(n_u) = X_u;
  const Eigen::MatrixXd D2 = pairwise_sqdist(X);

  const auto objective = [&](double beta) -> double {
    const SimilarityGraph g = graph_from_sqdist(D2, beta);
    const PropagatedLabels c =
        opt.classifier == Classifier::label_spreading
            ? propagate_ls(g, labels, opt.alpha, opt.tau, opt.eps)
            : propagate_lp(g, labels, opt.tau, opt.eps);
    return entropy(c);
  };

  const double lo = std::log(opt.beta_lo), hi = std::log(opt.beta_hi);
  double x = std::log(opt.beta_init);
  double fx;
  try {
    fx = objective(std::exp(x));
  } catch (const std::exception& e) {
    std::cerr << "learn_beta: objective failed at init (" << e.what()
              << "); falling back to beta = " << opt.beta_init << "\n";
    return opt.beta_init;
  }
  if (!std::isfinite(fx)) {
    std::cerr << "learn_beta: nonfinite entropy at init; falling back to beta = "
              << opt.beta_init << "\n";
    return opt.beta_init;
  }

  double step = std::log(4.0);
  for (int it = 0; it < opt.max_iters && step > opt.log_step_tol; ++it) {
    const double xp = std::min(x + step, hi);
    const double xm = std::max(x - step, lo);
    const double fp = xp != x ? objective(std::exp(xp)) : fx;
    const double fm = xm != x ? objective(std::exp(xm)) : fx;
    if (std::isfinite(fp) && fp < fx - 1e-12 && fp <= fm) {
      x = xp;
      fx = fp;
    } else if (std::isfinite(fm) && fm < fx - 1e-12) {
      x = xm;
      fx = fm;
    } else {
      step *= 0.5;
    }
  }
  return std::exp(x);
}

// Inductive class-1 probability at arbitrary x: RBF-weighted column sums of
// the propagated labels, normalized across the two columns. Weights are
// rescaled by the largest log-weight among rows that carry label mass, which
// keeps the denominator >= 1 for any beta; rows with zero label mass cannot
// contribute and are excluded from the rescaling.
class InductivePredictor {
 public:
  InductivePredictor(Eigen::MatrixXd X, const PropagatedLabels& c, double beta)
      : X_(std::move(X)), C_(c.rows), beta_(beta) {
    if (X_.rows() != C_.rows()) throw std::invalid_argument("predictor: size mismatch");
    if (!(beta > 0.0)) throw std::invalid_argument("predictor: beta must be > 0");
    for (Eigen::Index i = 0; i < C_.rows(); ++i)
      if (C_.row(i).sum() > 0.0) mass_rows_.push_back(i);
    if (mass_rows_.empty())
      throw std::invalid_argument("predictor: all propagated-label rows are zero");
  }

  double class1(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd lw = -beta_ * (X_.rowwise() - x.transpose()).rowwise().squaredNorm();
    double shift = lw[mass_rows_.front()];
    for (Eigen::Index i : mass_rows_) shift = std::max(shift, lw[i]);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i : mass_rows_) {
      const double w = std::exp(lw[i] - shift);
      num += w * C_(i, 1);
      den += w * (C_(i, 0) + C_(i, 1));
    }
    return num / den;
  }

  double operator()(const Eigen::VectorXd& x) const { return class1(x); }

  Eigen::Index dims() const { return X_.cols(); }

 private:
  Eigen::MatrixXd X_;
  Eigen::MatrixXd C_;
  double beta_;
  std::vector<Eigen::Index> mass_rows_;
};

inline double predict_class1(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                             const PropagatedLabels& c, double beta) {
  return InductivePredictor(X, c, beta).class1(x);
}

}  // namespace cpbo
