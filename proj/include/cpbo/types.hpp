#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "cpbo/space.hpp"

namespace cpbo {

// Evaluated dataset: one point per objective evaluation, in evaluation order.
struct History {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;

  std::size_t size() const { return points.size(); }

  void append(Eigen::VectorXd x, double y) {
    points.push_back(std::move(x));
    values.push_back(y);
  }

  // n_l x d matrix of the labeled points.
  Eigen::MatrixXd matrix() const {
    if (points.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(points.size()), points[0].size());
    for (std::size_t i = 0; i < points.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = points[i];
    return X;
  }

  void check_inside(const SearchSpace& space) const {
    for (const auto& p : points)
      if (!space.contains(p)) throw std::logic_error("History: point outside search space");
  }
};

// Binary labels for the evaluated points. Column 0 is Class 0 (above the
// threshold), column 1 is Class 1 (at or below it).
struct ClassLabels {
  std::vector<int> cls;  // 0 or 1 per point

  explicit ClassLabels(std::vector<int> c = {}) : cls(std::move(c)) {
    for (int v : cls)
      if (v != 0 && v != 1) throw std::invalid_argument("ClassLabels: entries must be 0 or 1");
  }

  std::size_t size() const { return cls.size(); }

  int count(int c) const {
    int n = 0;
    for (int v : cls) n += (v == c);
    return n;
  }

  Eigen::MatrixXd onehot() const {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cls.size()), 2);
    for (std::size_t i = 0; i < cls.size(); ++i) C(static_cast<Eigen::Index>(i), cls[i]) = 1.0;
    return C;
  }
};

// Finite candidate set for the pool scenario. Candidates marked evaluated are
// never proposed again.
struct PoolSet {
  Eigen::MatrixXd candidates;   // m x d
  std::vector<char> evaluated;  // per-candidate mask

  PoolSet() = default;
  explicit PoolSet(Eigen::MatrixXd cand)
      : candidates(std::move(cand)), evaluated(static_cast<std::size_t>(candidates.rows()), 0) {}

  Eigen::Index size() const { return candidates.rows(); }

  Eigen::Index unevaluated_count() const {
    Eigen::Index n = 0;
    for (char e : evaluated) n += (e == 0);
    return n;
  }

  std::vector<Eigen::Index> unevaluated_indices() const {
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(size()));
    for (Eigen::Index i = 0; i < size(); ++i)
      if (!evaluated[static_cast<std::size_t>(i)]) idx.push_back(i);
    return idx;
  }

  void check_inside(const SearchSpace& space) const {
    for (Eigen::Index i = 0; i < size(); ++i)
      if (!space.contains(candidates.row(i).transpose()))
        throw std::invalid_argument("PoolSet: candidate outside search space");
  }
};

}  // namespace cpbo
