#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace cpbo {

// Axis-aligned closed box; doubles as the truncation region for unlabeled
// point sampling.
struct SearchSpace {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  SearchSpace(Eigen::VectorXd lo, Eigen::VectorXd up)
      : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.size() == 0 || lower.size() != upper.size())
      throw std::invalid_argument("SearchSpace: bounds must be nonempty and equal-sized");
    for (Eigen::Index k = 0; k < lower.size(); ++k) {
      if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || !(lower[k] < upper[k]))
        throw std::invalid_argument("SearchSpace: requires lower[k] < upper[k], finite");
    }
  }

  static SearchSpace unit_cube(Eigen::Index d) {
    return SearchSpace(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
  }

  Eigen::Index dims() const { return lower.size(); }

  bool contains(const Eigen::VectorXd& x) const {
    if (x.size() != lower.size()) return false;
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }

  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }

  double width(Eigen::Index k) const { return upper[k] - lower[k]; }
  double max_width() const { return (upper - lower).maxCoeff(); }
};

}  // namespace cpbo
