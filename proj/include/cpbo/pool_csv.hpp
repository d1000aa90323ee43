#pragma once

#include <Eigen/Core>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpbo/config.hpp"
#include "cpbo/space.hpp"
#include "cpbo/types.hpp"

namespace cpbo {

// Candidate pool loaded from CSV: d feature columns followed by one objective
// column, header row required.
struct PoolCsv {
  Eigen::MatrixXd X;                       // m x d features
  Eigen::VectorXd y;                       // objective column
  std::vector<std::string> feature_names;
  std::string value_name;

  PoolSet pool() const { return PoolSet(X); }
  double min_value() const { return y.minCoeff(); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

inline PoolCsv load_pool_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pool CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file, header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 2)
    throw std::invalid_argument(path + ": need at least one feature column and one value column");

  PoolCsv out;
  out.feature_names.assign(header.begin(), header.end() - 1);
  out.value_name = header.back();
  const std::size_t ncols = header.size();

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != ncols)
      throw std::invalid_argument(path + ": line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(ncols) + " columns, got " +
                                  std::to_string(cells.size()));
    std::vector<double> row(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      double v = 0;
      const std::string& cell = cells[c];
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                    ": bad numeric value '" + cell + "'");
      if (!std::isfinite(v))
        throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                    ": nonfinite value in column '" + header[c] + "'");
      row[c] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": no data rows");

  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(ncols - 1);
  out.X.resize(m, d);
  out.y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) out.X(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    out.y[i] = rows[static_cast<std::size_t>(i)].back();
  }
  return out;
}

// Check every candidate against explicit bounds, reporting the first
// offending CSV line.
inline void validate_pool_bounds(const PoolCsv& csv, const SearchSpace& space,
                                 const std::string& path = "pool") {
  if (space.dims() != csv.X.cols())
    throw std::invalid_argument(path + ": bounds dimension does not match feature count");
  for (Eigen::Index i = 0; i < csv.X.rows(); ++i)
    if (!space.contains(csv.X.row(i).transpose()))
      throw std::invalid_argument(path + ": line " + std::to_string(i + 2) +
                                  ": candidate outside the given bounds");
}

// Bounding box of the candidates; degenerate (constant) columns are padded so
// the box stays a valid search space.
inline SearchSpace pool_bounding_box(const PoolCsv& csv, double pad = 0.5) {
  Eigen::VectorXd lo = csv.X.colwise().minCoeff();
  Eigen::VectorXd hi = csv.X.colwise().maxCoeff();
  for (Eigen::Index k = 0; k < lo.size(); ++k)
    if (!(lo[k] < hi[k])) {
      lo[k] -= pad;
      hi[k] += pad;
    }
  return SearchSpace(lo, hi);
}

}  // namespace cpbo
