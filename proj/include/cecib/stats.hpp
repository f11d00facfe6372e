#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "cecib/dataset.hpp"

namespace cecib {

/// Sufficient statistics of one cluster.
///
/// `scatter` is the sum of centered outer products, so the ML covariance is
/// scatter / count. Insertions and removals are exact rank-one updates.
struct ClusterStats {
  std::size_t count = 0;
  Vector mean;
  Matrix scatter;
  std::size_t labeled_count = 0;
  std::vector<std::size_t> category_counts;

  ClusterStats() = default;
  ClusterStats(std::size_t dims, std::size_t categories);

  std::size_t dims() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t categories() const { return category_counts.size(); }
  bool empty() const { return count == 0; }

  /// ML covariance scatter / count. Requires count >= 1.
  Matrix covariance() const;

  void add(const Eigen::Ref<const Vector>& x, std::optional<std::size_t> label);
  void remove(const Eigen::Ref<const Vector>& x, std::optional<std::size_t> label);
};

ClusterStats add_point(ClusterStats stats, const Eigen::Ref<const Vector>& x,
                       std::optional<std::size_t> label = std::nullopt);
ClusterStats remove_point(ClusterStats stats, const Eigen::Ref<const Vector>& x,
                          std::optional<std::size_t> label = std::nullopt);

/// Batch statistics over the listed rows of `data`.
ClusterStats stats_of(const Dataset& data, const std::vector<std::size_t>& rows,
                      const std::vector<std::optional<std::size_t>>& labels,
                      std::size_t categories);

struct GaussianModel {
  Vector mean;
  Matrix covariance;
  Matrix cholesky_lower;
  double log_det = 0.0;
};

/// Factorizes `covariance`; throws DegenerateModel if it is not positive definite.
GaussianModel make_model(Vector mean, Matrix covariance);

/// Differential entropy in nats: N/2 ln(2 pi e) + 1/2 ln det Sigma.
double gaussian_entropy(const GaussianModel& model);
double gaussian_entropy(std::size_t dims, double log_det);

/// Gaussian with covariance scatter/count + ridge I. Requires count >= 2.
GaussianModel model_of(const ClusterStats& stats, double ridge);

/// ln N(x | model).
double log_density(const GaussianModel& model, const Eigen::Ref<const Vector>& x);

/// Shannon entropy (nats) of a count histogram; zero counts contribute 0.
double count_entropy(const std::vector<std::size_t>& counts);

}  // namespace cecib
