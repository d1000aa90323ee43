#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace cpbo {

// Dense RBF similarity structure over the concatenated labeled+unlabeled
// points. Self-loops are kept (w_ii = 1), so every degree is >= 1 and the
// normalized operators below are always well defined.
struct SimilarityGraph {
  Eigen::MatrixXd W;       // n x n, symmetric, entries in (0, 1]
  Eigen::VectorXd degree;  // row sums
  double beta = 0.0;

  Eigen::Index n() const { return W.rows(); }
};

inline double rbf_similarity(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("rbf_similarity: beta must be > 0");
  if (xi.size() != xj.size()) throw std::invalid_argument("rbf_similarity: dimension mismatch");
  if (!xi.allFinite() || !xj.allFinite())
    throw std::invalid_argument("rbf_similarity: nonfinite input");
  return std::exp(-beta * (xi - xj).squaredNorm());
}

// Pairwise squared Euclidean distances, computed per entry so the matrix is
// exactly symmetric with an exactly zero diagonal.
inline Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd D2(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    D2(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = (X.row(i) - X.row(j)).squaredNorm();
      D2(i, j) = d2;
      D2(j, i) = d2;
    }
  }
  return D2;
}

inline SimilarityGraph graph_from_sqdist(const Eigen::MatrixXd& D2, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("graph_from_sqdist: beta must be > 0");
  SimilarityGraph g;
  g.beta = beta;
  g.W = (-beta * D2.array()).exp();
  g.degree = g.W.rowwise().sum();
  return g;
}

inline SimilarityGraph build_graph(const Eigen::MatrixXd& X, double beta) {
  if (X.rows() < 2) throw std::invalid_argument("build_graph: need at least two points");
  if (!X.allFinite()) throw std::invalid_argument("build_graph: nonfinite input");
  return graph_from_sqdist(pairwise_sqdist(X), beta);
}

// Row-stochastic transition operator M = D^{-1} W. Because W is symmetric this
// is equivalent to the column-normalized transition matrix applied transposed.
inline Eigen::MatrixXd row_stochastic_propagator(const SimilarityGraph& g) {
  return g.degree.cwiseInverse().asDiagonal() * g.W;
}

// Symmetrically normalized operator S = D^{-1/2} W D^{-1/2}; spectral radius 1.
inline Eigen::MatrixXd symmetric_propagator(const SimilarityGraph& g) {
  const Eigen::VectorXd dinv_sqrt = g.degree.cwiseSqrt().cwiseInverse();
  return dinv_sqrt.asDiagonal() * g.W * dinv_sqrt.asDiagonal();
}

}  // namespace cpbo
