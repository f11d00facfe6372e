#include "cecib/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <Eigen/Cholesky>

#include "cecib/error.hpp"

namespace cecib {

namespace {

// Sorted summation keeps the result independent of label order.
double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double entropy_of_sizes(const std::vector<std::size_t>& sizes, double n) {
  std::vector<double> terms;
  for (std::size_t s : sizes) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / n;
    terms.push_back(-p * std::log(p));
  }
  return sorted_sum(std::move(terms));
}

std::size_t floor_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

double nmi(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) fail(ErrorKind::InvalidInput, "partitions differ in size");
  if (a.size() == 0) fail(ErrorKind::InvalidInput, "nmi of empty partitions");
  validate(a);
  validate(b);
  const double n = static_cast<double>(a.size());
  const auto size_a = a.cluster_sizes();
  const auto size_b = b.cluster_sizes();
  std::vector<std::size_t> table(a.k * b.k, 0);
  for (std::size_t i = 0; i < a.size(); ++i) ++table[a.assignment[i] * b.k + b.assignment[i]];

  const double h_a = entropy_of_sizes(size_a, n);
  const double h_b = entropy_of_sizes(size_b, n);
  const double h_sum = h_a + h_b;
  if (h_sum == 0.0) return 1.0;

  std::vector<double> terms;
  for (std::size_t i = 0; i < a.k; ++i) {
    for (std::size_t j = 0; j < b.k; ++j) {
      const std::size_t nij = table[i * b.k + j];
      if (nij == 0) continue;
      const double joint = static_cast<double>(nij);
      const double outer = static_cast<double>(size_a[i]) * static_cast<double>(size_b[j]);
      terms.push_back(joint / n * std::log(joint * n / outer));
    }
  }
  const double mutual = sorted_sum(std::move(terms));
  return std::clamp(2.0 * mutual / h_sum, 0.0, 1.0);
}

void validate(const LabelProtocol& protocol) {
  if (!(protocol.labeled_fraction >= 0.0 && protocol.labeled_fraction <= 1.0)) {
    fail(ErrorKind::Configuration, "labeled fraction must lie in [0, 1]");
  }
  if (!(protocol.noise_fraction >= 0.0 && protocol.noise_fraction <= 1.0)) {
    fail(ErrorKind::Configuration, "noise fraction must lie in [0, 1]");
  }
  if (protocol.class_subset && protocol.class_subset->empty()) {
    fail(ErrorKind::Configuration, "class subset must not be empty");
  }
}

SideInfo sample_side_info(const Clustering& true_labels, const LabelProtocol& protocol) {
  validate(protocol);
  validate(true_labels);
  const std::size_t n = true_labels.size();
  SideInfo side{std::vector<std::optional<std::size_t>>(n), true_labels.k};

  std::vector<std::size_t> eligible;
  if (protocol.class_subset) {
    const std::set<std::size_t> keep(protocol.class_subset->begin(),
                                     protocol.class_subset->end());
    for (std::size_t i = 0; i < n; ++i) {
      if (keep.contains(true_labels.assignment[i])) eligible.push_back(i);
    }
    if (eligible.empty()) {
      fail(ErrorKind::Configuration, "the selected classes cover no points");
    }
  } else {
    eligible.resize(n);
    std::iota(eligible.begin(), eligible.end(), 0);
  }

  const std::size_t wanted = floor_count(protocol.labeled_fraction, n);
  if (wanted == 0) return side;
  if (wanted > eligible.size()) {
    fail(ErrorKind::Configuration, "cannot label " + std::to_string(wanted) +
                                       " points, only " + std::to_string(eligible.size()) +
                                       " belong to the selected classes");
  }

  std::mt19937_64 rng(protocol.seed);
  std::shuffle(eligible.begin(), eligible.end(), rng);
  eligible.resize(wanted);
  std::sort(eligible.begin(), eligible.end());
  std::set<std::size_t> present;
  for (std::size_t i : eligible) {
    side.labels[i] = true_labels.assignment[i];
    present.insert(true_labels.assignment[i]);
  }

  const std::size_t flips = floor_count(protocol.noise_fraction, wanted);
  if (flips == 0) return side;
  if (present.size() < 2) {
    fail(ErrorKind::Configuration, "label noise needs at least two categories in the sample");
  }
  const std::vector<std::size_t> categories(present.begin(), present.end());
  std::shuffle(eligible.begin(), eligible.end(), rng);
  std::uniform_int_distribution<std::size_t> other(0, categories.size() - 2);
  for (std::size_t f = 0; f < flips; ++f) {
    auto& label = side.labels[eligible[f]];
    // Index into `categories` with the original label skipped.
    const std::size_t original =
        static_cast<std::size_t>(std::lower_bound(categories.begin(), categories.end(), *label) -
                                 categories.begin());
    std::size_t pick = other(rng);
    if (pick >= original) ++pick;
    label = categories[pick];
  }
  return side;
}

std::pair<Dataset, Clustering> gaussian_mixture_sample(
    const std::vector<MixtureComponent>& components, std::size_t n, std::uint64_t seed) {
  if (components.empty()) fail(ErrorKind::InvalidInput, "mixture needs a component");
  const Eigen::Index dims = components.front().mean.size();
  if (dims == 0) fail(ErrorKind::InvalidInput, "mixture components need a mean");
  double weight_sum = 0.0;
  std::vector<double> weights;
  std::vector<Matrix> factors;
  for (const auto& c : components) {
    if (c.mean.size() != dims || c.covariance.rows() != dims || c.covariance.cols() != dims) {
      fail(ErrorKind::InvalidInput, "mixture components disagree on dimension");
    }
    if (!(c.weight > 0.0)) fail(ErrorKind::InvalidInput, "mixture weights must be positive");
    Eigen::LLT<Matrix> llt(c.covariance);
    if (llt.info() != Eigen::Success || !c.covariance.isApprox(c.covariance.transpose())) {
      fail(ErrorKind::InvalidInput, "mixture covariance is not symmetric positive definite");
    }
    factors.emplace_back(llt.matrixL());
    weights.push_back(c.weight);
    weight_sum += c.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    fail(ErrorKind::InvalidInput, "mixture weights must sum to 1");
  }

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.values.resize(static_cast<Eigen::Index>(n), dims);
  for (Eigen::Index j = 0; j < dims; ++j) data.feature_names.push_back("x" + std::to_string(j));
  Clustering truth{std::vector<std::size_t>(n), components.size()};
  Vector z(dims);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = pick(rng);
    for (Eigen::Index j = 0; j < dims; ++j) z(j) = normal(rng);
    data.values.row(static_cast<Eigen::Index>(i)) =
        (components[c].mean + factors[c] * z).transpose();
    truth.assignment[i] = c;
  }
  return {std::move(data), std::move(truth)};
}

std::vector<GridRow> run_protocol_grid(const Dataset& data, const Clustering& true_labels,
                                       const ProtocolGrid& grid, const FitConfig& config) {
  if (true_labels.size() != data.rows()) {
    fail(ErrorKind::InvalidInput, "true labels do not match the dataset");
  }
  if (grid.repetitions == 0 && !grid.protocols.empty() && !grid.betas.empty()) {
    fail(ErrorKind::Configuration, "grid repetitions must be positive");
  }
  std::vector<GridRow> rows;
  for (std::size_t p = 0; p < grid.protocols.size(); ++p) {
    const std::uint64_t protocol_seed = derive_seed(config.seed, p);
    for (double beta : grid.betas) {
      std::vector<double> scores;
      double k_sum = 0.0;
      double epoch_sum = 0.0;
      for (std::size_t r = 0; r < grid.repetitions; ++r) {
        LabelProtocol protocol = grid.protocols[p];
        protocol.seed = derive_seed(protocol_seed, 2 * r);
        const SideInfo side = sample_side_info(true_labels, protocol);
        FitConfig cell = config;
        cell.beta = beta;
        cell.seed = derive_seed(protocol_seed, 2 * r + 1);
        const FitReport report = fit(data, side, cell);
        scores.push_back(nmi(report.clustering, true_labels));
        k_sum += static_cast<double>(report.clustering.k);
        epoch_sum += static_cast<double>(report.epochs_run);
      }
      const double reps = static_cast<double>(grid.repetitions);
      GridRow row;
      row.fraction = grid.protocols[p].labeled_fraction;
      row.noise = grid.protocols[p].noise_fraction;
      row.beta = beta;
      row.mean_nmi = std::accumulate(scores.begin(), scores.end(), 0.0) / reps;
      double ss = 0.0;
      for (double s : scores) ss += (s - row.mean_nmi) * (s - row.mean_nmi);
      row.sd_nmi = scores.size() > 1 ? std::sqrt(ss / (reps - 1.0)) : 0.0;
      row.mean_k = k_sum / reps;
      row.mean_epochs = epoch_sum / reps;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_grid_table(std::ostream& out, const std::vector<GridRow>& rows) {
  out << "fraction,noise,beta,mean_nmi,sd_nmi,mean_k,mean_epochs\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.fraction,
                  r.noise, r.beta, r.mean_nmi, r.sd_nmi, r.mean_k, r.mean_epochs);
    out << line;
  }
}

}  // namespace cecib
