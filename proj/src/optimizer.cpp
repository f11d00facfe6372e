#include "cecib/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cecib/error.hpp"

namespace cecib {

namespace {

constexpr std::size_t kResyncInterval = 10000;
constexpr std::size_t kInitAttempts = 100;
constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

std::size_t resolve_min_points(const FitConfig& config, std::size_t dims) {
  return config.min_cluster_points == 0 ? dims + 1 : config.min_cluster_points;
}

double energy_or_inf(const ClusterStats& stats, std::size_t n, double beta, double ridge) {
  try {
    return cluster_energy(stats, n, beta, ridge);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateModel) return std::numeric_limits<double>::infinity();
    throw;
  }
}

}  // namespace

void validate(const FitConfig& config, std::size_t dims) {
  if (!(config.beta >= 0.0) || !std::isfinite(config.beta)) {
    fail(ErrorKind::Configuration, "beta must be a non-negative finite number");
  }
  if (config.k_init == 0) fail(ErrorKind::Configuration, "k_init must be positive");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
    fail(ErrorKind::Configuration, "epsilon must lie in (0, 1)");
  }
  if (config.restarts == 0) fail(ErrorKind::Configuration, "restarts must be positive");
  if (config.max_epochs == 0) fail(ErrorKind::Configuration, "max_epochs must be positive");
  if (config.ridge && (!(*config.ridge >= 0.0) || !std::isfinite(*config.ridge))) {
    fail(ErrorKind::Configuration, "ridge must be a non-negative finite number");
  }
  if (config.min_cluster_points != 0 && config.min_cluster_points < dims + 1) {
    fail(ErrorKind::Configuration,
         "min_cluster_points must be at least N + 1 = " + std::to_string(dims + 1));
  }
}

double default_ridge(const Dataset& data) {
  const double n = static_cast<double>(data.rows());
  const Matrix centered = data.values.rowwise() - data.values.colwise().mean();
  const double trace = centered.squaredNorm() / n;
  return 1e-6 * trace / static_cast<double>(data.dims());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over master + index * golden ratio
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::optional<double> move_delta(const ClusterStats& from, const ClusterStats& to,
                                 const Eigen::Ref<const Vector>& x,
                                 std::optional<std::size_t> label, std::size_t n_total,
                                 const FitConfig& config, double ridge) {
  if (&from == &to) return 0.0;
  const std::size_t min_points = resolve_min_points(config, static_cast<std::size_t>(x.size()));
  if (from.count < min_points + 1) return std::nullopt;
  const ClusterStats from_without = remove_point(from, x, label);
  const ClusterStats to_with = add_point(to, x, label);
  const double beta = config.beta;
  return energy_or_inf(from, n_total, beta, ridge) + energy_or_inf(to, n_total, beta, ridge) -
         energy_or_inf(from_without, n_total, beta, ridge) -
         energy_or_inf(to_with, n_total, beta, ridge);
}

Clustering random_partition(std::size_t n, std::size_t k, std::size_t min_points,
                            std::mt19937_64& rng) {
  if (k == 0 || n < k * min_points) {
    fail(ErrorKind::Configuration, "cannot split " + std::to_string(n) + " points into " +
                                       std::to_string(k) + " clusters of at least " +
                                       std::to_string(min_points) + " points");
  }
  Clustering out{std::vector<std::size_t>(n), k};
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (std::size_t attempt = 0; attempt < kInitAttempts; ++attempt) {
    std::vector<std::size_t> sizes(k, 0);
    for (auto& a : out.assignment) {
      a = pick(rng);
      ++sizes[a];
    }
    if (*std::min_element(sizes.begin(), sizes.end()) >= min_points) return out;
  }
  // Tight n / k ratios: deal a shuffled permutation round-robin.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < n; ++i) out.assignment[order[i]] = i % k;
  return out;
}

HartiganState::HartiganState(const Dataset& data, const SideInfo& side, const FitConfig& config,
                             double ridge, Clustering initial, std::uint64_t seed)
    : data_(data),
      side_(side),
      config_(config),
      ridge_(ridge),
      min_points_(resolve_min_points(config, data.dims())),
      assignment_(std::move(initial.assignment)),
      rng_(seed) {
  if (assignment_.size() != data.rows()) {
    fail(ErrorKind::InvalidInput, "initial clustering does not match the dataset");
  }
  Clustering c{assignment_, initial.k};
  validate(c);
  clusters_ = batch_stats(data_, c, side_);
  for (std::size_t i = 0; i < clusters_.size(); ++i) {
    if (clusters_[i].empty()) {
      fail(ErrorKind::EmptyCluster, "initial cluster " + std::to_string(i) + " is empty");
    }
  }
  energies_.reserve(clusters_.size());
  for (const auto& s : clusters_) energies_.push_back(energy(s));
}

double HartiganState::energy(const ClusterStats& stats) const {
  return energy_or_inf(stats, data_.rows(), config_.beta, ridge_);
}

Clustering HartiganState::clustering() const { return Clustering{assignment_, clusters_.size()}; }

double HartiganState::total_cost() const {
  return std::accumulate(energies_.begin(), energies_.end(), 0.0);
}

std::optional<double> HartiganState::move_delta(std::size_t point, std::size_t target) const {
  const std::size_t source = assignment_.at(point);
  if (target >= clusters_.size()) fail(ErrorKind::InvalidInput, "target cluster out of range");
  if (target == source) return 0.0;
  return cecib::move_delta(clusters_[source], clusters_[target], data_.point(point),
                           side_.labels[point], data_.rows(), config_, ridge_);
}

void HartiganState::note_update() {
  if (++updates_since_sync_ >= kResyncInterval) resynchronize();
}

void HartiganState::move(std::size_t point, std::size_t target) {
  const std::size_t source = assignment_.at(point);
  if (target >= clusters_.size()) fail(ErrorKind::InvalidInput, "target cluster out of range");
  if (target == source) return;
  const Vector x = data_.point(point);
  clusters_[source].remove(x, side_.labels[point]);
  clusters_[target].add(x, side_.labels[point]);
  assignment_[point] = target;
  energies_[source] = clusters_[source].empty() ? 0.0 : energy(clusters_[source]);
  energies_[target] = energy(clusters_[target]);
  note_update();
}

void HartiganState::delete_cluster(std::size_t cluster) {
  if (cluster >= clusters_.size()) fail(ErrorKind::InvalidInput, "cluster index out of range");
  if (clusters_.size() == 1) {
    fail(ErrorKind::Precondition, "cannot delete the only remaining cluster");
  }
  std::vector<std::size_t> orphans;
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] == cluster) {
      orphans.push_back(i);
      assignment_[i] = kUnassigned;
    } else if (assignment_[i] > cluster) {
      --assignment_[i];
    }
  }
  clusters_.erase(clusters_.begin() + static_cast<std::ptrdiff_t>(cluster));
  energies_.erase(energies_.begin() + static_cast<std::ptrdiff_t>(cluster));

  std::shuffle(orphans.begin(), orphans.end(), rng_);
  for (std::size_t point : orphans) {
    const Vector x = data_.point(point);
    const auto label = side_.labels[point];
    std::size_t best = 0;
    double best_increase = std::numeric_limits<double>::infinity();
    double best_energy = 0.0;
    for (std::size_t c = 0; c < clusters_.size(); ++c) {
      const double e = energy(add_point(clusters_[c], x, label));
      const double increase = e - energies_[c];
      if (increase < best_increase) {
        best = c;
        best_increase = increase;
        best_energy = e;
      }
    }
    clusters_[best].add(x, label);
    energies_[best] = std::isfinite(best_increase) ? best_energy : energy(clusters_[best]);
    assignment_[point] = best;
    note_update();
  }
}

void HartiganState::resynchronize() {
  clusters_ = batch_stats(data_, clustering(), side_);
  for (std::size_t c = 0; c < clusters_.size(); ++c) {
    energies_[c] = clusters_[c].empty() ? 0.0 : energy(clusters_[c]);
  }
  updates_since_sync_ = 0;
}

namespace {

struct RunResult {
  RunSummary summary;
  std::vector<std::size_t> assignment;
  std::vector<ClusterStats> clusters;
  std::size_t audit_violations = 0;
};

RunResult run_once(const Dataset& data, const SideInfo& side, const FitConfig& config,
                   double ridge, std::uint64_t seed) {
  std::mt19937_64 init_rng(seed);
  const std::size_t min_points = resolve_min_points(config, data.dims());
  Clustering initial = random_partition(data.rows(), config.k_init, min_points, init_rng);
  HartiganState state(data, side, config, ridge, std::move(initial), derive_seed(seed, 1));

  RunResult result;
  if (!std::isfinite(state.total_cost())) {
    fail(ErrorKind::DegenerateModel,
         "initial clustering has a singular cluster covariance; increase the ridge");
  }
  result.summary.cost_trace.push_back(state.total_cost());

  const double n = static_cast<double>(data.rows());
  const double threshold = config.epsilon * n;
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);

  auto full_cost = [&] {
    return cecib_cost(data, state.clustering(), side, config.beta, ridge).total;
  };

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    ++result.summary.epochs;
    std::shuffle(order.begin(), order.end(), state.rng());
    std::size_t moves = 0;
    bool deleted = false;

    for (std::size_t point : order) {
      const std::size_t current = state.assignment()[point];
      std::size_t best = current;
      double best_gain = kMinImprovement;
      for (std::size_t target = 0; target < state.k(); ++target) {
        if (target == current) continue;
        const auto gain = state.move_delta(point, target);
        if (gain && *gain > best_gain) {
          best = target;
          best_gain = *gain;
        }
      }
      if (best == current) continue;

      const double before = config.audit ? full_cost() : 0.0;
      state.move(point, best);
      ++moves;
      if (config.audit && !(full_cost() < before)) ++result.audit_violations;

      if (state.k() > 1 && static_cast<double>(state.clusters()[current].count) < threshold) {
        state.delete_cluster(current);
        ++result.summary.clusters_deleted;
        deleted = true;
      }
    }

    // Clusters that never lost a point can still sit below the threshold.
    while (state.k() > 1) {
      std::size_t smallest = state.k();
      for (std::size_t c = 0; c < state.k(); ++c) {
        const auto count = state.clusters()[c].count;
        if (static_cast<double>(count) < threshold &&
            (smallest == state.k() || count < state.clusters()[smallest].count)) {
          smallest = c;
        }
      }
      if (smallest == state.k()) break;
      state.delete_cluster(smallest);
      ++result.summary.clusters_deleted;
      deleted = true;
    }

    result.summary.moves += moves;
    result.summary.cost_trace.push_back(state.total_cost());
    if (moves == 0 && !deleted) break;
  }

  result.summary.total = state.total_cost();
  result.summary.final_k = state.k();
  result.assignment = state.assignment();
  result.clusters = state.clusters();
  return result;
}

}  // namespace

FitReport fit(const Dataset& data, const SideInfo& side, const FitConfig& config) {
  validate(data);
  if (side.size() != data.rows()) {
    fail(ErrorKind::InvalidInput, "side information does not match the dataset");
  }
  validate(side);
  validate(config, data.dims());

  const std::size_t min_points = resolve_min_points(config, data.dims());
  if (data.rows() < config.k_init * min_points) {
    fail(ErrorKind::Configuration,
         "k_init = " + std::to_string(config.k_init) + " needs at least " +
             std::to_string(config.k_init * min_points) + " points, dataset has " +
             std::to_string(data.rows()));
  }
  if (default_ridge(data) == 0.0) {
    fail(ErrorKind::DegenerateModel, "all data points are identical");
  }
  const double ridge = config.ridge.value_or(default_ridge(data));

  FitReport report;
  report.ridge = ridge;
  std::optional<RunResult> best;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    RunResult run = run_once(data, side, config, ridge, derive_seed(config.seed, r));
    report.restarts.push_back(run.summary);
    report.audit_violations += run.audit_violations;
    if (!best || run.summary.total < best->summary.total) {
      best = std::move(run);
      report.restart_index = r;
    }
  }

  report.clustering = Clustering{best->assignment, best->clusters.size()};
  report.cluster_stats = std::move(best->clusters);
  report.cost = cecib_cost(data, report.clustering, side, config.beta, ridge);
  report.epochs_run = best->summary.epochs;
  report.moves_made = best->summary.moves;
  report.clusters_deleted = best->summary.clusters_deleted;
  report.cost_trace = best->summary.cost_trace;
  return report;
}

}  // namespace cecib
