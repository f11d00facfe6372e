#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cecib/dataset.hpp"
#include "cecib/partition.hpp"
#include "cecib/stats.hpp"

namespace cecib {

/// The terms of the CEC-IB cost. `side_term` is H(Z|Y) before weighting, so
/// total = partition_term + model_term + beta * side_term.
struct CostBreakdown {
  double partition_term = 0.0;
  double model_term = 0.0;
  double side_term = 0.0;
  double beta = 0.0;
  double total = 0.0;
};

/// Cost contribution of one cluster given its statistics:
/// |Y|/|X| * (-ln(|Y|/|X|) + H(N(mu_Y, Sigma_Y + ridge I)) + beta * H(Z | Y ∩ X_l)).
double cluster_energy(const ClusterStats& stats, std::size_t n_total, double beta,
                      double ridge);

/// Per-cluster statistics of `clustering` over `data`, two passes over the rows.
std::vector<ClusterStats> batch_stats(const Dataset& data, const Clustering& clustering,
                                      const SideInfo& side);

/// Plain CEC cost H(Y) + sum_i p_i H(N(mu_i, Sigma_i)).
CostBreakdown cec_cost(const Dataset& data, const Clustering& clustering, double ridge);

/// CEC-IB cost with partition-level side information.
CostBreakdown cecib_cost(const Dataset& data, const Clustering& clustering,
                         const SideInfo& side, double beta, double ridge);

/// Cost of the single cluster made of `points` (row indices into `data`).
double cluster_cost(const Dataset& data, std::span<const std::size_t> points,
                    const SideInfo& side, double beta, std::size_t n_total, double ridge);

/// Conditional cross-entropy of the data given the categories, evaluated
/// point by point with per-category weights |Z_j ∩ Y_i| / |Z_j|. Requires
/// every point to be labeled.
double conditional_cross_entropy(const Dataset& data, const Clustering& clustering,
                                 const SideInfo& side, double ridge);

}  // namespace cecib
