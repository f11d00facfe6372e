#pragma once

#include <cstddef>
#include <vector>

#include "cecib/dataset.hpp"
#include "cecib/partition.hpp"

namespace cecib {

/// A block of clusters that a coarser clustering merges into one.
struct MergeScenario {
  std::vector<double> weights;       // p_i = |Y_i| / |X| of the merged members
  std::vector<Matrix> covariances;   // Sigma_i of the merged members
  Matrix merged_covariance;          // Sigma of their union
};

/// Weight above which keeping the block split is no more expensive than
/// merging it:
///   1 + sum_i p_i/(2q) ln(det Sigma_i / det Sigma) / H(p_i/q),  q = sum_i p_i.
double beta_threshold(const MergeScenario& scenario);

/// Variance of either half of a unit Gaussian truncated at its mean, 1 - 2/pi.
double truncated_half_variance();

/// Threshold for splitting a 1-D Gaussian into equal halves at its mean:
/// 1 + ln sqrt(1 - 2/pi) / ln 2.
double beta0_gaussian_halves();

/// The MergeScenario behind beta0_gaussian_halves.
MergeScenario gaussian_halves_scenario();

/// beta_threshold with weights and covariances estimated from `clustering`;
/// `merged_block` lists the cluster indices that are merged.
double empirical_beta_threshold(const Dataset& data, const Clustering& clustering,
                                const std::vector<std::size_t>& merged_block, double ridge);

}  // namespace cecib
