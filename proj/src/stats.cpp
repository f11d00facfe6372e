#include "cecib/stats.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "cecib/error.hpp"

namespace cecib {

namespace {

void check_dims(const ClusterStats& stats, const Eigen::Ref<const Vector>& x) {
  if (static_cast<std::size_t>(x.size()) != stats.dims()) {
    fail(ErrorKind::InvalidInput, "point has dimension " + std::to_string(x.size()) +
                                      ", cluster statistics expect " +
                                      std::to_string(stats.dims()));
  }
}

void check_label(const ClusterStats& stats, std::optional<std::size_t> label) {
  if (label && *label >= stats.categories()) {
    fail(ErrorKind::InvalidInput, "category " + std::to_string(*label) +
                                      " out of range (m = " +
                                      std::to_string(stats.categories()) + ")");
  }
}

}  // namespace

ClusterStats::ClusterStats(std::size_t dims, std::size_t categories)
    : mean(Vector::Zero(static_cast<Eigen::Index>(dims))),
      scatter(Matrix::Zero(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(dims))),
      category_counts(categories, 0) {}

Matrix ClusterStats::covariance() const {
  if (count == 0) fail(ErrorKind::EmptyCluster, "covariance of an empty cluster");
  return scatter / static_cast<double>(count);
}

void ClusterStats::add(const Eigen::Ref<const Vector>& x, std::optional<std::size_t> label) {
  check_dims(*this, x);
  check_label(*this, label);
  const double n = static_cast<double>(count);
  if (count == 0) {
    mean = x;
    scatter.setZero();
  } else {
    const Vector delta = x - mean;
    mean += delta / (n + 1.0);
    scatter.noalias() += (n / (n + 1.0)) * delta * delta.transpose();
  }
  ++count;
  if (label) {
    ++category_counts[*label];
    ++labeled_count;
  }
}

void ClusterStats::remove(const Eigen::Ref<const Vector>& x, std::optional<std::size_t> label) {
  check_dims(*this, x);
  check_label(*this, label);
  if (count == 0) fail(ErrorKind::EmptyCluster, "cannot remove a point from an empty cluster");
  if (label && category_counts[*label] == 0) {
    fail(ErrorKind::InvalidInput,
         "cluster holds no point of category " + std::to_string(*label));
  }
  if (count == 1) {
    mean.setZero();
    scatter.setZero();
  } else {
    const double n = static_cast<double>(count);
    const Vector reduced = (n * mean - x) / (n - 1.0);
    const Vector delta = x - reduced;
    scatter.noalias() -= ((n - 1.0) / n) * delta * delta.transpose();
    mean = reduced;
  }
  --count;
  if (label) {
    --category_counts[*label];
    --labeled_count;
  }
}

ClusterStats add_point(ClusterStats stats, const Eigen::Ref<const Vector>& x,
                       std::optional<std::size_t> label) {
  stats.add(x, label);
  return stats;
}

ClusterStats remove_point(ClusterStats stats, const Eigen::Ref<const Vector>& x,
                          std::optional<std::size_t> label) {
  stats.remove(x, label);
  return stats;
}

ClusterStats stats_of(const Dataset& data, const std::vector<std::size_t>& rows,
                      const std::vector<std::optional<std::size_t>>& labels,
                      std::size_t categories) {
  ClusterStats stats(data.dims(), categories);
  if (rows.empty()) return stats;

  // Two-pass batch computation; used to resynchronize incremental state.
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(data.dims()));
  for (std::size_t r : rows) mean += data.values.row(static_cast<Eigen::Index>(r)).transpose();
  mean /= static_cast<double>(rows.size());
  Matrix scatter = Matrix::Zero(mean.size(), mean.size());
  for (std::size_t r : rows) {
    const Vector d = data.values.row(static_cast<Eigen::Index>(r)).transpose() - mean;
    scatter.noalias() += d * d.transpose();
  }
  stats.count = rows.size();
  stats.mean = std::move(mean);
  stats.scatter = std::move(scatter);
  for (std::size_t r : rows) {
    if (r < labels.size() && labels[r]) {
      if (*labels[r] >= categories) {
        fail(ErrorKind::InvalidInput, "category index out of range in stats_of");
      }
      ++stats.category_counts[*labels[r]];
      ++stats.labeled_count;
    }
  }
  return stats;
}

GaussianModel make_model(Vector mean, Matrix covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size() ||
      mean.size() == 0) {
    fail(ErrorKind::InvalidInput, "covariance must be square and match the mean dimension");
  }
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::DegenerateModel, "covariance is not positive definite");
  }
  Matrix lower = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    const double d = lower(i, i);
    if (!(d > 0.0) || !std::isfinite(d)) {
      fail(ErrorKind::DegenerateModel, "covariance is not positive definite");
    }
    log_det += 2.0 * std::log(d);
  }
  return GaussianModel{std::move(mean), std::move(covariance), std::move(lower), log_det};
}

double gaussian_entropy(std::size_t dims, double log_det) {
  constexpr double log_2pie = 2.8378770664093454836;  // ln(2 pi e)
  return 0.5 * static_cast<double>(dims) * log_2pie + 0.5 * log_det;
}

double gaussian_entropy(const GaussianModel& model) {
  return gaussian_entropy(static_cast<std::size_t>(model.mean.size()), model.log_det);
}

GaussianModel model_of(const ClusterStats& stats, double ridge) {
  if (ridge < 0.0 || !std::isfinite(ridge)) {
    fail(ErrorKind::InvalidInput, "ridge must be a non-negative finite number");
  }
  if (stats.count < 2) {
    fail(ErrorKind::DegenerateModel, "a Gaussian model needs at least 2 points, cluster has " +
                                         std::to_string(stats.count));
  }
  Matrix cov = stats.scatter / static_cast<double>(stats.count);
  cov.diagonal().array() += ridge;
  return make_model(stats.mean, std::move(cov));
}

double log_density(const GaussianModel& model, const Eigen::Ref<const Vector>& x) {
  const Vector centered = x - model.mean;
  const Vector z = model.cholesky_lower.triangularView<Eigen::Lower>().solve(centered);
  const double dims = static_cast<double>(model.mean.size());
  return -0.5 * (dims * std::log(2.0 * std::numbers::pi) + model.log_det + z.squaredNorm());
}

double count_entropy(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  if (total == 0) return 0.0;
  const double t = static_cast<double>(total);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / t;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace cecib
