#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "cecib/dataset.hpp"
#include "cecib/partition.hpp"

namespace cecib {

struct LoadedData {
  Dataset data;
  SideInfo side;
  /// Category names in index order (first appearance in the file).
  std::vector<std::string> category_names;
};

/// Comma-separated table with a header row. Every column other than
/// `label_column` must be numeric; empty label cells mean "unlabeled".
LoadedData load_csv(const std::string& path, const std::optional<std::string>& label_column);
LoadedData parse_csv(std::istream& in, const std::optional<std::string>& label_column,
                     const std::string& source = "<stream>");

struct PcaModel {
  Vector center;
  Matrix components;   // N x d, orthonormal columns
  Vector eigenvalues;  // all N eigenvalues of the sample covariance, descending
};

/// Top-d principal axes. Each axis is signed so that its largest-magnitude
/// entry is positive.
PcaModel pca_fit(const Dataset& data, std::size_t d);

/// Centers the data and projects it onto the top-d principal axes.
Dataset pca_reduce(const Dataset& data, std::size_t d);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomically(const std::string& path, const std::string& content);

}  // namespace cecib
