#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace cecib {

/// Partition-level side information: an optional category per point.
struct SideInfo {
  std::vector<std::optional<std::size_t>> labels;
  std::size_t categories = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t labeled_count() const;

  /// Side information with no labels for n points.
  static SideInfo unlabeled(std::size_t n);
};

/// Hard assignment of n points to clusters 0..k-1.
struct Clustering {
  std::vector<std::size_t> assignment;
  std::size_t k = 0;

  std::size_t size() const { return assignment.size(); }
  std::vector<std::size_t> cluster_sizes() const;
  std::vector<std::size_t> members(std::size_t cluster) const;
};

void validate(const SideInfo& side);
void validate(const Clustering& clustering);

/// Relabels clusters to 0..k'-1 in order of first appearance, dropping empty ones.
Clustering compact(const Clustering& clustering);

/// k x m table of |Y_i ∩ Z_j|.
std::vector<std::vector<std::size_t>> contingency(const Clustering& clustering,
                                                  const SideInfo& side);

/// H(Y) in nats.
double partition_entropy(const Clustering& clustering);

/// H(Z) over the labeled points.
double category_entropy(const SideInfo& side);

/// H(Z|Y) = sum_i |Y_i|/|X| H(Z | Y_i ∩ X_l). Clusters without labeled
/// points contribute 0. Throws Precondition when nothing is labeled.
double conditional_entropy(const Clustering& clustering, const SideInfo& side);

/// Same as conditional_entropy but 0 (instead of an error) without labels.
double conditional_entropy_or_zero(const Clustering& clustering, const SideInfo& side);

/// H(Z, Y) over the labeled points.
double joint_entropy(const Clustering& clustering, const SideInfo& side);

/// Every cluster intersects at most one category.
bool is_consistent(const Clustering& clustering, const SideInfo& side);

/// | |Y_i|/|X| - |Y_i ∩ X_l|/|X_l| | <= tol for every cluster.
bool is_proportional(const Clustering& clustering, const SideInfo& side, double tol);

/// Every cluster of `fine` lies inside exactly one cluster of `coarse`.
bool is_coarsening(const Clustering& coarse, const Clustering& fine);

struct ChainRuleSides {
  double lhs;  // H(Y) + H(Z|Y)
  double rhs;  // H(Z, Y)
};

/// Both sides of the entropy chain rule; requires a proportional clustering
/// (tolerance 1e-9), otherwise throws Precondition.
ChainRuleSides joint_entropy_check(const Clustering& clustering, const SideInfo& side);

}  // namespace cecib
