#include "cecib/dataset.hpp"

#include <cmath>
#include <string>

#include "cecib/error.hpp"

namespace cecib {

void validate(const Dataset& data) {
  if (data.rows() == 0 || data.dims() == 0) {
    fail(ErrorKind::InvalidInput, "dataset must have at least one row and one column");
  }
  for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.values.cols(); ++j) {
      if (!std::isfinite(data.values(i, j))) {
        fail(ErrorKind::InvalidInput, "non-finite value at row " + std::to_string(i) +
                                          ", column " + std::to_string(j));
      }
    }
  }
}

}  // namespace cecib
