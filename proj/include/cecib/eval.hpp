#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "cecib/dataset.hpp"
#include "cecib/optimizer.hpp"
#include "cecib/partition.hpp"

namespace cecib {

/// Normalized mutual information 2 I(A;B) / (H(A) + H(B)). Two single-cluster
/// partitions score 1.
double nmi(const Clustering& a, const Clustering& b);

/// How side information is drawn from the true classes.
struct LabelProtocol {
  double labeled_fraction = 0.0;
  double noise_fraction = 0.0;
  std::optional<std::vector<std::size_t>> class_subset;
  std::uint64_t seed = 0;
};

void validate(const LabelProtocol& protocol);

/// Labels floor(labeled_fraction * n) points drawn without replacement
/// (only from `class_subset` when given), then moves floor(noise_fraction *
/// labeled) of them to a different category among those present.
SideInfo sample_side_info(const Clustering& true_labels, const LabelProtocol& protocol);

struct MixtureComponent {
  double weight = 1.0;
  Vector mean;
  Matrix covariance;
};

/// n draws from a Gaussian mixture and the component each came from.
std::pair<Dataset, Clustering> gaussian_mixture_sample(
    const std::vector<MixtureComponent>& components, std::size_t n, std::uint64_t seed);

struct ProtocolGrid {
  std::vector<LabelProtocol> protocols;
  std::vector<double> betas;
  std::size_t repetitions = 10;
};

struct GridRow {
  double fraction = 0.0;
  double noise = 0.0;
  double beta = 0.0;
  double mean_nmi = 0.0;
  double sd_nmi = 0.0;
  double mean_k = 0.0;
  double mean_epochs = 0.0;
};

/// Fits every (protocol, beta) cell `repetitions` times and averages NMI
/// against `true_labels`. Side information and fit seeds depend on the
/// master seed, the protocol index and the repetition, so cells that only
/// differ in beta see the same samples.
std::vector<GridRow> run_protocol_grid(const Dataset& data, const Clustering& true_labels,
                                       const ProtocolGrid& grid, const FitConfig& config);

void write_grid_table(std::ostream& out, const std::vector<GridRow>& rows);

}  // namespace cecib
