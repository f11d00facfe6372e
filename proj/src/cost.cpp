#include "cecib/cost.hpp"

#include <cmath>
#include <string>

#include "cecib/error.hpp"

namespace cecib {

namespace {

void check_inputs(const Dataset& data, const Clustering& clustering, const SideInfo& side) {
  if (clustering.size() != data.rows()) {
    fail(ErrorKind::InvalidInput, "clustering covers " + std::to_string(clustering.size()) +
                                      " points, dataset has " + std::to_string(data.rows()));
  }
  if (side.size() != data.rows()) {
    fail(ErrorKind::InvalidInput, "side information covers " + std::to_string(side.size()) +
                                      " points, dataset has " + std::to_string(data.rows()));
  }
  validate(clustering);
  validate(side);
}

GaussianModel named_model(const ClusterStats& stats, std::size_t cluster, double ridge) {
  if (stats.count == 0) {
    fail(ErrorKind::EmptyCluster, "cluster " + std::to_string(cluster) + " is empty");
  }
  try {
    return model_of(stats, ridge);
  } catch (const Error& e) {
    fail(e.kind(), "cluster " + std::to_string(cluster) + ": " + e.what());
  }
}

}  // namespace

double cluster_energy(const ClusterStats& stats, std::size_t n_total, double beta,
                      double ridge) {
  if (stats.count == 0) fail(ErrorKind::EmptyCluster, "energy of an empty cluster");
  if (n_total == 0 || stats.count > n_total) {
    fail(ErrorKind::InvalidInput, "cluster size exceeds the data set size");
  }
  const double mass = static_cast<double>(stats.count) / static_cast<double>(n_total);
  const double model = gaussian_entropy(model_of(stats, ridge));
  const double side = stats.labeled_count > 0 ? count_entropy(stats.category_counts) : 0.0;
  return mass * (-std::log(mass) + model + beta * side);
}

std::vector<ClusterStats> batch_stats(const Dataset& data, const Clustering& clustering,
                                      const SideInfo& side) {
  check_inputs(data, clustering, side);
  const auto dims = static_cast<Eigen::Index>(data.dims());
  std::vector<ClusterStats> stats(clustering.k, ClusterStats(data.dims(), side.categories));
  std::vector<Vector> sums(clustering.k, Vector::Zero(dims));
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const std::size_t c = clustering.assignment[i];
    sums[c] += data.values.row(static_cast<Eigen::Index>(i)).transpose();
    ++stats[c].count;
    if (side.labels[i]) {
      ++stats[c].category_counts[*side.labels[i]];
      ++stats[c].labeled_count;
    }
  }
  for (std::size_t c = 0; c < clustering.k; ++c) {
    if (stats[c].count > 0) stats[c].mean = sums[c] / static_cast<double>(stats[c].count);
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto& s = stats[clustering.assignment[i]];
    const Vector d = data.values.row(static_cast<Eigen::Index>(i)).transpose() - s.mean;
    s.scatter.noalias() += d * d.transpose();
  }
  return stats;
}

CostBreakdown cecib_cost(const Dataset& data, const Clustering& clustering,
                         const SideInfo& side, double beta, double ridge) {
  if (beta < 0.0 || !std::isfinite(beta)) {
    fail(ErrorKind::InvalidInput, "beta must be a non-negative finite number");
  }
  const auto stats = batch_stats(data, clustering, side);
  const double n = static_cast<double>(data.rows());
  CostBreakdown cost;
  cost.beta = beta;
  for (std::size_t c = 0; c < stats.size(); ++c) {
    const auto model = named_model(stats[c], c, ridge);
    const double p = static_cast<double>(stats[c].count) / n;
    cost.partition_term -= p * std::log(p);
    cost.model_term += p * gaussian_entropy(model);
    if (stats[c].labeled_count > 0) cost.side_term += p * count_entropy(stats[c].category_counts);
  }
  cost.total = cost.partition_term + cost.model_term + beta * cost.side_term;
  return cost;
}

CostBreakdown cec_cost(const Dataset& data, const Clustering& clustering, double ridge) {
  CostBreakdown cost =
      cecib_cost(data, clustering, SideInfo::unlabeled(data.rows()), 0.0, ridge);
  cost.side_term = 0.0;
  return cost;
}

double cluster_cost(const Dataset& data, std::span<const std::size_t> points,
                    const SideInfo& side, double beta, std::size_t n_total, double ridge) {
  if (side.size() != data.rows()) {
    fail(ErrorKind::InvalidInput, "side information does not match the dataset");
  }
  validate(side);
  ClusterStats stats(data.dims(), side.categories);
  for (std::size_t r : points) {
    if (r >= data.rows()) fail(ErrorKind::InvalidInput, "point index out of range");
    stats.add(data.point(r), side.labels[r]);
  }
  if (stats.count < 2) {
    fail(ErrorKind::DegenerateModel, "a cluster needs at least 2 points to be costed");
  }
  return cluster_energy(stats, n_total, beta, ridge);
}

double conditional_cross_entropy(const Dataset& data, const Clustering& clustering,
                                 const SideInfo& side, double ridge) {
  check_inputs(data, clustering, side);
  if (side.labeled_count() != data.rows()) {
    fail(ErrorKind::Unsupported,
         "conditional cross-entropy is defined only for fully labeled data");
  }
  const auto stats = batch_stats(data, clustering, side);
  std::vector<GaussianModel> models;
  models.reserve(stats.size());
  for (std::size_t c = 0; c < stats.size(); ++c) models.push_back(named_model(stats[c], c, ridge));

  std::vector<std::size_t> category_sizes(side.categories, 0);
  for (const auto& l : side.labels) ++category_sizes[*l];

  // -1/|X| sum_x ln( p_{y(x)}(z(x)) f_{y(x)}(x) )
  double acc = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const std::size_t c = clustering.assignment[i];
    const std::size_t j = *side.labels[i];
    const double weight = static_cast<double>(stats[c].category_counts[j]) /
                          static_cast<double>(category_sizes[j]);
    acc += std::log(weight) + log_density(models[c], data.point(i));
  }
  return -acc / static_cast<double>(data.rows());
}

}  // namespace cecib
