#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cecib {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// n x N feature matrix, one point per row.
struct Dataset {
  Matrix values;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(values.cols()); }

  Vector point(std::size_t i) const {
    return values.row(static_cast<Eigen::Index>(i)).transpose();
  }
};

/// Throws InvalidInput unless every value is finite and n, N >= 1.
void validate(const Dataset& data);

}  // namespace cecib
