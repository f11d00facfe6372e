#include "cecib/partition.hpp"

#include <cmath>
#include <string>

#include "cecib/error.hpp"
#include "cecib/stats.hpp"

namespace cecib {

namespace {

void check_same_size(const Clustering& clustering, const SideInfo& side) {
  if (clustering.size() != side.size()) {
    fail(ErrorKind::InvalidInput, "clustering covers " + std::to_string(clustering.size()) +
                                      " points, side information " +
                                      std::to_string(side.size()));
  }
}

double plogp_sum(const std::vector<std::size_t>& counts, double total) {
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

std::size_t SideInfo::labeled_count() const {
  std::size_t n = 0;
  for (const auto& l : labels) n += l.has_value();
  return n;
}

SideInfo SideInfo::unlabeled(std::size_t n) {
  return SideInfo{std::vector<std::optional<std::size_t>>(n), 0};
}

std::vector<std::size_t> Clustering::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t a : assignment) {
    if (a >= k) fail(ErrorKind::InvalidInput, "cluster index out of range");
    ++sizes[a];
  }
  return sizes;
}

std::vector<std::size_t> Clustering::members(std::size_t cluster) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == cluster) out.push_back(i);
  }
  return out;
}

void validate(const SideInfo& side) {
  for (std::size_t i = 0; i < side.labels.size(); ++i) {
    if (side.labels[i] && *side.labels[i] >= side.categories) {
      fail(ErrorKind::InvalidInput, "label of point " + std::to_string(i) +
                                        " is outside 0.." +
                                        std::to_string(side.categories));
    }
  }
}

void validate(const Clustering& clustering) {
  for (std::size_t i = 0; i < clustering.assignment.size(); ++i) {
    if (clustering.assignment[i] >= clustering.k) {
      fail(ErrorKind::InvalidInput, "point " + std::to_string(i) +
                                        " assigned to cluster " +
                                        std::to_string(clustering.assignment[i]) +
                                        " but k = " + std::to_string(clustering.k));
    }
  }
}

Clustering compact(const Clustering& clustering) {
  std::vector<std::size_t> remap(clustering.k, clustering.k);
  Clustering out;
  out.assignment.reserve(clustering.size());
  for (std::size_t a : clustering.assignment) {
    if (a >= clustering.k) fail(ErrorKind::InvalidInput, "cluster index out of range");
    if (remap[a] == clustering.k) remap[a] = out.k++;
    out.assignment.push_back(remap[a]);
  }
  return out;
}

std::vector<std::vector<std::size_t>> contingency(const Clustering& clustering,
                                                  const SideInfo& side) {
  check_same_size(clustering, side);
  validate(clustering);
  validate(side);
  std::vector<std::vector<std::size_t>> table(clustering.k,
                                              std::vector<std::size_t>(side.categories, 0));
  for (std::size_t i = 0; i < clustering.size(); ++i) {
    if (side.labels[i]) ++table[clustering.assignment[i]][*side.labels[i]];
  }
  return table;
}

double partition_entropy(const Clustering& clustering) {
  if (clustering.size() == 0) fail(ErrorKind::InvalidInput, "empty clustering");
  return plogp_sum(clustering.cluster_sizes(), static_cast<double>(clustering.size()));
}

double category_entropy(const SideInfo& side) {
  validate(side);
  std::vector<std::size_t> counts(side.categories, 0);
  for (const auto& l : side.labels) {
    if (l) ++counts[*l];
  }
  return count_entropy(counts);
}

double conditional_entropy_or_zero(const Clustering& clustering, const SideInfo& side) {
  const auto table = contingency(clustering, side);
  const auto sizes = clustering.cluster_sizes();
  const double n = static_cast<double>(clustering.size());
  double h = 0.0;
  for (std::size_t i = 0; i < clustering.k; ++i) {
    h += static_cast<double>(sizes[i]) / n * count_entropy(table[i]);
  }
  return h;
}

double conditional_entropy(const Clustering& clustering, const SideInfo& side) {
  if (side.labeled_count() == 0) {
    fail(ErrorKind::Precondition, "conditional entropy needs at least one labeled point");
  }
  return conditional_entropy_or_zero(clustering, side);
}

double joint_entropy(const Clustering& clustering, const SideInfo& side) {
  const auto table = contingency(clustering, side);
  std::vector<std::size_t> cells;
  std::size_t labeled = 0;
  for (const auto& row : table) {
    for (std::size_t c : row) {
      cells.push_back(c);
      labeled += c;
    }
  }
  if (labeled == 0) {
    fail(ErrorKind::Precondition, "joint entropy needs at least one labeled point");
  }
  return plogp_sum(cells, static_cast<double>(labeled));
}

bool is_consistent(const Clustering& clustering, const SideInfo& side) {
  for (const auto& row : contingency(clustering, side)) {
    std::size_t touched = 0;
    for (std::size_t c : row) touched += (c > 0);
    if (touched > 1) return false;
  }
  return true;
}

bool is_proportional(const Clustering& clustering, const SideInfo& side, double tol) {
  const auto table = contingency(clustering, side);
  const std::size_t labeled = side.labeled_count();
  if (labeled == 0) {
    fail(ErrorKind::Precondition, "proportionality needs at least one labeled point");
  }
  const auto sizes = clustering.cluster_sizes();
  const double n = static_cast<double>(clustering.size());
  for (std::size_t i = 0; i < clustering.k; ++i) {
    std::size_t in_cluster = 0;
    for (std::size_t c : table[i]) in_cluster += c;
    const double mass = static_cast<double>(sizes[i]) / n;
    const double labeled_mass = static_cast<double>(in_cluster) / static_cast<double>(labeled);
    if (std::abs(mass - labeled_mass) > tol) return false;
  }
  return true;
}

bool is_coarsening(const Clustering& coarse, const Clustering& fine) {
  if (coarse.size() != fine.size()) {
    fail(ErrorKind::InvalidInput, "clusterings cover different point counts");
  }
  validate(coarse);
  validate(fine);
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(fine.k, unset);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    std::size_t& p = parent[fine.assignment[i]];
    if (p == unset) {
      p = coarse.assignment[i];
    } else if (p != coarse.assignment[i]) {
      return false;
    }
  }
  return true;
}

ChainRuleSides joint_entropy_check(const Clustering& clustering, const SideInfo& side) {
  if (!is_proportional(clustering, side, 1e-9)) {
    fail(ErrorKind::Precondition, "chain rule check requires a proportional clustering");
  }
  return ChainRuleSides{partition_entropy(clustering) + conditional_entropy(clustering, side),
                        joint_entropy(clustering, side)};
}

}  // namespace cecib
