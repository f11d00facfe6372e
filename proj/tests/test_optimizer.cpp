#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "cecib/cost.hpp"
#include "cecib/error.hpp"
#include "cecib/eval.hpp"
#include "cecib/optimizer.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cecib;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

Dataset two_blobs(std::size_t per_blob, std::uint64_t seed, double gap = 10.0) {
  Vector a = Vector::Zero(2);
  Vector b = Vector::Zero(2);
  b(0) = gap;
  return gaussian_mixture_sample(
             {{0.5, a, Matrix::Identity(2, 2)}, {0.5, b, Matrix::Identity(2, 2)}}, 2 * per_blob,
             seed)
      .first;
}

double max_stats_gap(const Dataset& data, const SideInfo& side, const Clustering& c,
                     const std::vector<ClusterStats>& kept) {
  const auto batch = batch_stats(data, c, side);
  double gap = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].count != kept[i].count) return std::numeric_limits<double>::infinity();
    if (batch[i].category_counts != kept[i].category_counts) {
      return std::numeric_limits<double>::infinity();
    }
    if (batch[i].count == 0) continue;
    gap = std::max(gap, (batch[i].mean - kept[i].mean).cwiseAbs().maxCoeff());
    gap = std::max(gap, (batch[i].scatter - kept[i].scatter).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace

TEST_CASE("four points on a line reach the global optimum") {
  const auto data = oracle::make_dataset({{0.0}, {0.1}, {10.0}, {10.1}});
  FitConfig config;
  config.beta = 0.0;
  config.k_init = 2;
  const auto report = fit(data, SideInfo::unlabeled(4), config);
  CHECK(report.clustering.k == 2);
  CHECK(report.clustering.assignment[0] == report.clustering.assignment[1]);
  CHECK(report.clustering.assignment[2] == report.clustering.assignment[3]);
  CHECK(report.clustering.assignment[0] != report.clustering.assignment[2]);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : oracle::set_partitions(4, 2)) {
    Clustering c{a, *std::max_element(a.begin(), a.end()) + 1};
    const auto sizes = c.cluster_sizes();
    if (*std::min_element(sizes.begin(), sizes.end()) < 2) continue;
    best = std::min(best, oracle::complete_label_cost(data, c, SideInfo::unlabeled(4), 0.0,
                                                      report.ridge));
  }
  CHECK(report.cost.total == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("move deltas match full recomputation") {
  std::mt19937_64 rng(51);
  // Hand-built: two 1-D clusters of three points, one mislabeled point.
  {
    const auto data = oracle::make_dataset({{0.0}, {0.5}, {1.2}, {7.0}, {8.0}, {0.9}});
    SideInfo side;
    side.categories = 2;
    side.labels = {0, 0, std::nullopt, 1, 1, 0};
    FitConfig config;
    config.beta = 1.0;
    HartiganState state(data, side, config, 1e-6, Clustering{{0, 0, 0, 1, 1, 1}, 2}, 1);
    const double before = cecib_cost(data, state.clustering(), side, 1.0, 1e-6).total;
    const auto delta = state.move_delta(5, 0);
    REQUIRE(delta.has_value());
    auto moved = state.clustering();
    moved.assignment[5] = 0;
    const double after = cecib_cost(data, moved, side, 1.0, 1e-6).total;
    CHECK(std::abs(*delta - (before - after)) <= 1e-10);
    CHECK(*delta > 0.0);
  }
  for (int t = 0; t < 200; ++t) {
    const std::size_t dims = 1 + t % 3;
    const auto data = oracle::random_dataset(40, dims, rng);
    SideInfo side;
    side.categories = 3;
    std::uniform_int_distribution<int> cat(-1, 2);
    for (int i = 0; i < 40; ++i) {
      const int c = cat(rng);
      side.labels.push_back(c < 0 ? std::nullopt : std::optional<std::size_t>(c));
    }
    FitConfig config;
    config.beta = 0.5 * (t % 4);
    const auto init = oracle::random_clustering(40, 3, dims + 3, rng);
    HartiganState state(data, side, config, 1e-3, init, 2);
    const std::size_t point = static_cast<std::size_t>(t) % 40;
    const std::size_t target = (init.assignment[point] + 1 + t % 2) % 3;
    const auto delta = state.move_delta(point, target);
    REQUIRE(delta.has_value());
    auto moved = init;
    moved.assignment[point] = target;
    const double before = cecib_cost(data, init, side, config.beta, 1e-3).total;
    const double after = cecib_cost(data, moved, side, config.beta, 1e-3).total;
    CHECK(std::abs(*delta - (before - after)) <= 1e-10);
    CHECK(std::abs(state.total_cost() - before) <= 1e-10);
  }
}

TEST_CASE("identity move, forbidden move and beta independence") {
  std::mt19937_64 rng(52);
  const auto data = oracle::random_dataset(12, 2, rng);
  const auto side = SideInfo::unlabeled(12);
  FitConfig config;
  HartiganState state(data, side, config, 1e-6,
                      Clustering{{0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1}, 2}, 3);
  CHECK(state.move_delta(0, 0) == 0.0);
  CHECK(move_delta(state.clusters()[0], state.clusters()[0], data.point(0), std::nullopt, 12,
                   config, 1e-6) == 0.0);
  // The source would keep only N = 2 points.
  CHECK_FALSE(state.move_delta(9, 0).has_value());
  CHECK(state.min_points() == 3);

  FitConfig zero = config;
  zero.beta = 0.0;
  FitConfig one = config;
  one.beta = 1.0;
  const auto& from = state.clusters()[0];
  const auto& to = state.clusters()[1];
  CHECK(*move_delta(from, to, data.point(0), std::nullopt, 12, zero, 1e-6) ==
        *move_delta(from, to, data.point(0), std::nullopt, 12, one, 1e-6));
}

TEST_CASE("deleting a lone point sends it to the nearest cluster in cost") {
  const auto data = oracle::make_dataset(
      {{0.0}, {0.3}, {0.6}, {0.9}, {1.2}, {20.0}, {20.4}, {20.8}, {1.0}});
  const auto side = SideInfo::unlabeled(9);
  HartiganState state(data, side, FitConfig{}, 1e-6, Clustering{{0, 0, 0, 0, 0, 1, 1, 1, 2}, 3},
                      4);
  CHECK(std::isinf(state.cluster_cost(2)));
  state.delete_cluster(2);
  CHECK(state.k() == 2);
  CHECK(state.assignment()[8] == state.assignment()[0]);
  CHECK(max_stats_gap(data, side, state.clustering(), state.clusters()) < 1e-12);
  CHECK(std::abs(state.total_cost() -
                 cecib_cost(data, state.clustering(), side, 1.0, 1e-6).total) < 1e-10);
}

TEST_CASE("the last cluster cannot be deleted") {
  const auto data = oracle::make_dataset({{0.0}, {1.0}, {2.0}});
  const auto side = SideInfo::unlabeled(3);
  HartiganState state(data, side, FitConfig{}, 0.0, Clustering{{0, 0, 0}, 1}, 5);
  CHECK(kind_of([&] { state.delete_cluster(0); }) == ErrorKind::Precondition);
}

TEST_CASE("a redundant initial cluster gets deleted") {
  const auto data = two_blobs(100, 53);
  FitConfig config;
  config.beta = 0.0;
  config.k_init = 3;
  config.epsilon = 0.1;
  const auto report = fit(data, SideInfo::unlabeled(200), config);
  CHECK(report.clusters_deleted >= 1);
  CHECK(report.clustering.k == 2);
}

TEST_CASE("fits are deterministic") {
  const auto data = two_blobs(80, 54, 4.0);
  FitConfig config;
  config.k_init = 5;
  config.restarts = 4;
  config.seed = 99;
  const auto a = fit(data, SideInfo::unlabeled(160), config);
  const auto b = fit(data, SideInfo::unlabeled(160), config);
  CHECK(a.clustering.assignment == b.clustering.assignment);
  CHECK(a.cost.total == b.cost.total);
  CHECK(a.cost_trace == b.cost_trace);
  CHECK(a.restart_index == b.restart_index);
  config.seed = 100;
  const auto c = fit(data, SideInfo::unlabeled(160), config);
  CHECK(c.restarts.size() == 4);
}

TEST_CASE("reports are internally consistent") {
  std::mt19937_64 rng(55);
  for (int t = 0; t < 10; ++t) {
    const auto [data, truth] = gaussian_mixture_sample(
        {{0.4, Vector::Zero(2), Matrix::Identity(2, 2)},
         {0.6, Vector::Constant(2, 3.0), 0.5 * Matrix::Identity(2, 2)}},
        150, 500 + t);
    const auto side = sample_side_info(truth, LabelProtocol{0.2, 0.1, std::nullopt, 7u + t});
    FitConfig config;
    config.k_init = 4;
    config.restarts = 3;
    config.seed = t;
    config.beta = 0.5 * t;
    config.audit = true;
    const auto report = fit(data, side, config);
    CHECK(report.audit_violations == 0);
    CHECK(report.clustering.k <= config.k_init);
    CHECK(report.epochs_run < config.max_epochs);
    CHECK(report.cost_trace.size() == report.epochs_run + 1);
    CHECK(report.cost_trace.back() == doctest::Approx(report.cost.total).epsilon(1e-10));
    for (const auto& run : report.restarts) {
      for (std::size_t e = 1; e < run.cost_trace.size(); ++e) {
        CHECK(run.cost_trace[e] <= run.cost_trace[e - 1]);
      }
      CHECK(report.cost.total <= run.total + 1e-9);
    }
    CHECK(max_stats_gap(data, side, report.clustering, report.cluster_stats) <= 1e-8);
  }
}

TEST_CASE("periodic resynchronization keeps the statistics exact") {
  std::mt19937_64 rng(56);
  for (double scale : {1.0, 1e3}) {
    const auto data = oracle::random_dataset(30, 3, rng, scale);
    const auto side = SideInfo::unlabeled(30);
    HartiganState state(data, side, FitConfig{}, 1e-6, oracle::random_clustering(30, 2, 8, rng),
                        6);
    std::uniform_int_distribution<std::size_t> pick(0, 29);
    for (int step = 0; step < 25000; ++step) {
      const std::size_t p = pick(rng);
      const std::size_t target = 1 - state.assignment()[p];
      if (state.clusters()[state.assignment()[p]].count > 8) state.move(p, target);
    }
    // Absolute 1e-8 at unit scale; the same relative accuracy at scale^2.
    CHECK(max_stats_gap(data, side, state.clustering(), state.clusters()) <=
          1e-8 * scale * scale);
  }
}

namespace {

struct RandomLabels {
  Dataset data;
  SideInfo side;
};

RandomLabels single_gaussian_random_labels(double fraction) {
  MixtureComponent unit{1.0, Vector::Zero(2), Matrix::Identity(2, 2)};
  RandomLabels out{gaussian_mixture_sample({unit}, 400, 57).first, {}};
  std::mt19937_64 rng(58);
  out.side.categories = 2;
  std::bernoulli_distribution labeled(fraction);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < out.data.rows(); ++i) {
    out.side.labels.push_back(labeled(rng) ? std::optional<std::size_t>(coin(rng) ? 1 : 0)
                                           : std::nullopt);
  }
  return out;
}

}  // namespace

std::size_t merged_runs(const RandomLabels& inst, double beta, double* single_cost = nullptr,
                        FitReport* out = nullptr) {
  FitConfig config;
  config.beta = beta;
  config.k_init = 2;
  auto report = fit(inst.data, inst.side, config);
  std::size_t merged = 0;
  for (const auto& run : report.restarts) merged += run.final_k == 1 ? 1 : 0;
  if (single_cost) {
    const Clustering one{std::vector<std::size_t>(inst.data.rows(), 0), 1};
    *single_cost = cecib_cost(inst.data, one, inst.side, beta, report.ridge).total;
  }
  if (out) *out = std::move(report);
  return merged;
}

TEST_CASE("random labels on 30% of points with beta below one merge a single Gaussian") {
  const auto inst = single_gaussian_random_labels(0.3);
  CHECK(merged_runs(inst, 0.9) * 2 > 10);
}

TEST_CASE("fully random labeling with beta below one merges a single Gaussian") {
  const auto inst = single_gaussian_random_labels(1.0);
  CHECK(merged_runs(inst, 0.9) * 2 > 10);
}

TEST_CASE("random labels: the fit never costs more than a single cluster") {
  for (double fraction : {0.3, 1.0}) {
    const auto inst = single_gaussian_random_labels(fraction);
    double single = 0.0;
    FitReport report;
    merged_runs(inst, 0.9, &single, &report);
    CHECK(report.cost.total <= single + 1e-9);
  }
}

TEST_CASE("a single spherical Gaussian collapses to one cluster") {
  MixtureComponent unit{1.0, Vector::Zero(2), Matrix::Identity(2, 2)};
  const auto [data, ignored] = gaussian_mixture_sample({unit}, 500, 59);
  FitConfig config;
  config.beta = 0.0;
  config.k_init = 4;
  config.epsilon = 0.05;
  const auto report = fit(data, SideInfo::unlabeled(500), config);
  std::size_t single = 0;
  for (const auto& run : report.restarts) single += run.final_k == 1 ? 1 : 0;
  CHECK(single * 2 > report.restarts.size());

  // No bisection direction beats the fitted cost.
  const Vector center = data.values.colwise().mean();
  for (int d = 0; d < 36; ++d) {
    const double angle = d * 3.14159265358979 / 36.0;
    Clustering halves{std::vector<std::size_t>(500), 2};
    for (std::size_t i = 0; i < 500; ++i) {
      const Vector x = data.point(i) - center;
      halves.assignment[i] = x(0) * std::cos(angle) + x(1) * std::sin(angle) < 0 ? 0 : 1;
    }
    CHECK(report.cost.total <= cec_cost(data, halves, report.ridge).total);
  }
}

TEST_CASE("fully labeled separated classes end consistent") {
  const auto data = two_blobs(60, 60, 8.0);
  SideInfo side;
  side.categories = 2;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    side.labels.emplace_back(data.values(static_cast<Eigen::Index>(i), 0) < 4.0 ? 0 : 1);
  }
  FitConfig config;
  config.beta = 1.0;
  config.k_init = 4;
  const auto report = fit(data, side, config);
  CHECK(is_consistent(report.clustering, side));
  CHECK(report.cost.side_term == 0.0);
}

TEST_CASE("initial partitions respect the minimum size") {
  std::mt19937_64 rng(61);
  for (std::size_t n : {9u, 20u, 200u}) {
    const auto c = random_partition(n, 3, 3, rng);
    const auto sizes = c.cluster_sizes();
    CHECK(*std::min_element(sizes.begin(), sizes.end()) >= 3);
  }
  CHECK(kind_of([&] { random_partition(8, 3, 3, rng); }) == ErrorKind::Configuration);
}

TEST_CASE("configuration errors") {
  const auto data = oracle::make_dataset({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 2}});
  const auto side = SideInfo::unlabeled(5);
  FitConfig config;
  config.k_init = 2;
  CHECK(kind_of([&] { fit(data, side, config); }) == ErrorKind::Configuration);
  config.k_init = 1;
  config.min_cluster_points = 2;
  CHECK(kind_of([&] { fit(data, side, config); }) == ErrorKind::Configuration);
  config.min_cluster_points = 0;
  config.epsilon = 1.5;
  CHECK(kind_of([&] { fit(data, side, config); }) == ErrorKind::Configuration);
  config.epsilon = 0.02;
  config.beta = -1.0;
  CHECK(kind_of([&] { fit(data, side, config); }) == ErrorKind::Configuration);
  config.beta = 1.0;
  config.restarts = 0;
  CHECK(kind_of([&] { fit(data, side, config); }) == ErrorKind::Configuration);

  const auto same = oracle::make_dataset({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  CHECK(kind_of([&] { fit(same, SideInfo::unlabeled(4), FitConfig{.k_init = 1}); }) ==
        ErrorKind::DegenerateModel);
}

TEST_CASE("default ridge scales with the data") {
  const auto data = oracle::make_dataset({{0, 0}, {2, 0}, {0, 2}, {2, 2}});
  // Sample covariance is the identity: trace 2, N = 2.
  CHECK(default_ridge(data) == doctest::Approx(1e-6));
}

TEST_CASE("restart seeds differ") {
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
  CHECK(derive_seed(0, 0) != derive_seed(1, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
