#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cecib/cost.hpp"
#include "cecib/dataset.hpp"
#include "cecib/partition.hpp"
#include "cecib/stats.hpp"

namespace cecib {

struct FitConfig {
  double beta = 1.0;
  std::size_t k_init = 10;
  double epsilon = 0.02;  // deletion threshold as a fraction of n
  std::size_t restarts = 10;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  /// Covariance ridge. Unset: 1e-6 * trace(cov(X)) / N.
  std::optional<double> ridge;
  /// Smallest cluster a move may leave behind. 0 means N + 1; any explicit
  /// value below N + 1 is rejected.
  std::size_t min_cluster_points = 0;
  /// Recompute the full cost after every move and count non-improving ones.
  bool audit = false;
};

/// Throws Configuration on out-of-range fields for data of dimension `dims`.
void validate(const FitConfig& config, std::size_t dims);

/// 1e-6 * trace(sample covariance) / N.
double default_ridge(const Dataset& data);

/// Moves smaller than this never count as an improvement.
inline constexpr double kMinImprovement = 1e-12;

struct RunSummary {
  double total = 0.0;
  std::size_t epochs = 0;
  std::size_t moves = 0;
  std::size_t clusters_deleted = 0;
  std::size_t final_k = 0;
  /// Total cost at initialization followed by the total after every epoch.
  std::vector<double> cost_trace;
};

struct FitReport {
  Clustering clustering;
  CostBreakdown cost;
  std::size_t epochs_run = 0;
  std::size_t moves_made = 0;
  std::size_t clusters_deleted = 0;
  /// cost_trace of the winning run.
  std::vector<double> cost_trace;
  std::size_t restart_index = 0;
  std::vector<RunSummary> restarts;
  double ridge = 0.0;
  /// Incrementally maintained statistics of the winning run, indexed like `clustering`.
  std::vector<ClusterStats> cluster_stats;
  std::size_t audit_violations = 0;
};

/// Improvement in total cost from moving x out of `from` into `to`:
/// E(from) + E(to) - E(from \ x) - E(to ∪ x). Positive means the move lowers
/// the cost. Returns nullopt when the source would be left with fewer than
/// the configured minimum number of points. Passing the same object twice
/// is the identity move and yields 0.
std::optional<double> move_delta(const ClusterStats& from, const ClusterStats& to,
                                 const Eigen::Ref<const Vector>& x,
                                 std::optional<std::size_t> label, std::size_t n_total,
                                 const FitConfig& config, double ridge);

/// Mutable state of one Hartigan run. Keeps references to `data` and `side`,
/// which must outlive it.
class HartiganState {
 public:
  HartiganState(const Dataset& data, const SideInfo& side, const FitConfig& config,
                double ridge, Clustering initial, std::uint64_t seed);
  HartiganState(Dataset&&, const SideInfo&, const FitConfig&, double, Clustering,
                std::uint64_t) = delete;
  HartiganState(const Dataset&, SideInfo&&, const FitConfig&, double, Clustering,
                std::uint64_t) = delete;

  std::size_t k() const { return clusters_.size(); }
  const std::vector<ClusterStats>& clusters() const { return clusters_; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  Clustering clustering() const;

  double total_cost() const;
  double cluster_cost(std::size_t cluster) const { return energies_.at(cluster); }

  /// Gain of moving `point` to `target`, see move_delta.
  std::optional<double> move_delta(std::size_t point, std::size_t target) const;
  void move(std::size_t point, std::size_t target);

  /// Removes `cluster` and greedily reassigns its members, in shuffled order,
  /// to the cluster with the smallest cost increase. Refused when k = 1.
  void delete_cluster(std::size_t cluster);

  /// Rebuilds every cluster's statistics from the assignment.
  void resynchronize();

  std::mt19937_64& rng() { return rng_; }
  std::size_t min_points() const { return min_points_; }

 private:
  double energy(const ClusterStats& stats) const;
  void note_update();

  const Dataset& data_;
  const SideInfo& side_;
  FitConfig config_;
  double ridge_;
  std::size_t min_points_;
  std::vector<std::size_t> assignment_;
  std::vector<ClusterStats> clusters_;
  std::vector<double> energies_;
  std::mt19937_64 rng_;
  std::size_t updates_since_sync_ = 0;
};

/// Random initial clustering into k groups, redrawn until every group has at
/// least `min_points` members.
Clustering random_partition(std::size_t n, std::size_t k, std::size_t min_points,
                            std::mt19937_64& rng);

/// Hartigan minimization of the CEC-IB cost with cluster deletion. Returns
/// the lowest-cost run among `config.restarts`.
FitReport fit(const Dataset& data, const SideInfo& side, const FitConfig& config);

/// Seed for restart `index` derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace cecib
