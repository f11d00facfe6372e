#include "cecib/theory.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "cecib/cost.hpp"
#include "cecib/error.hpp"
#include "cecib/stats.hpp"

namespace cecib {

double beta_threshold(const MergeScenario& scenario) {
  const std::size_t members = scenario.weights.size();
  if (members < 2) fail(ErrorKind::Precondition, "a merged block needs at least 2 clusters");
  if (scenario.covariances.size() != members) {
    fail(ErrorKind::InvalidInput, "one covariance per merged cluster is required");
  }
  const Eigen::Index dims = scenario.merged_covariance.rows();
  const double merged_log_det =
      make_model(Vector::Zero(dims), scenario.merged_covariance).log_det;

  double q = 0.0;
  for (double p : scenario.weights) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      fail(ErrorKind::InvalidInput, "merge weights must be positive");
    }
    q += p;
  }

  double log_ratio = 0.0;
  double split_entropy = 0.0;
  for (std::size_t i = 0; i < members; ++i) {
    const double r = scenario.weights[i] / q;
    const double log_det = make_model(Vector::Zero(dims), scenario.covariances[i]).log_det;
    log_ratio += r / 2.0 * (log_det - merged_log_det);
    split_entropy -= r * std::log(r);
  }
  if (!(split_entropy > 0.0)) {
    fail(ErrorKind::Precondition, "degenerate scenario: split entropy is zero");
  }
  return 1.0 + log_ratio / split_entropy;
}

double truncated_half_variance() { return 1.0 - 2.0 / std::numbers::pi; }

double beta0_gaussian_halves() {
  return 1.0 + std::log(std::sqrt(truncated_half_variance())) / std::numbers::ln2;
}

MergeScenario gaussian_halves_scenario() {
  const Matrix half = Matrix::Constant(1, 1, truncated_half_variance());
  return MergeScenario{{0.5, 0.5}, {half, half}, Matrix::Identity(1, 1)};
}

double empirical_beta_threshold(const Dataset& data, const Clustering& clustering,
                                const std::vector<std::size_t>& merged_block, double ridge) {
  const std::set<std::size_t> block(merged_block.begin(), merged_block.end());
  if (block.size() != merged_block.size()) {
    fail(ErrorKind::InvalidInput, "merged block lists a cluster twice");
  }
  for (std::size_t c : block) {
    if (c >= clustering.k) fail(ErrorKind::InvalidInput, "merged block cluster out of range");
  }
  const SideInfo none = SideInfo::unlabeled(data.rows());
  const auto stats = batch_stats(data, clustering, none);

  std::vector<std::size_t> union_rows;
  for (std::size_t i = 0; i < clustering.size(); ++i) {
    if (block.contains(clustering.assignment[i])) union_rows.push_back(i);
  }
  const ClusterStats merged = stats_of(data, union_rows, none.labels, 0);

  const double n = static_cast<double>(data.rows());
  MergeScenario scenario;
  for (std::size_t c : merged_block) {
    scenario.weights.push_back(static_cast<double>(stats[c].count) / n);
    try {
      scenario.covariances.push_back(model_of(stats[c], ridge).covariance);
    } catch (const Error& e) {
      fail(e.kind(), "cluster " + std::to_string(c) + ": " + e.what());
    }
  }
  scenario.merged_covariance = model_of(merged, ridge).covariance;
  return beta_threshold(scenario);
}

}  // namespace cecib
