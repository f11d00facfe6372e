#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "cecib/eval.hpp"
#include "cecib/optimizer.hpp"
#include "cecib/partition.hpp"

namespace cecib {

/// "auto:halves" or a non-negative decimal number.
double parse_beta(const std::string& text);

/// Everything needed to reproduce one CLI run.
struct RunManifest {
  std::string input;
  std::optional<std::string> label_column;
  std::string beta_text = "1";
  double beta = 1.0;
  std::size_t k_init = 10;
  double epsilon = 0.02;
  std::size_t restarts = 10;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  std::optional<double> ridge;
  std::optional<std::size_t> pca_dims;
  std::string output;
};

void validate(const RunManifest& manifest);
FitConfig to_fit_config(const RunManifest& manifest);

/// Key/value report followed by an assignment block, one cluster index per line.
void write_report(std::ostream& out, const RunManifest& manifest, const FitReport& report,
                  double conditional_entropy, std::size_t dims);

struct ParsedReport {
  RunManifest manifest;
  Clustering clustering;
  std::map<std::string, std::string> fields;
};

ParsedReport read_report(std::istream& in);
ParsedReport read_report_file(const std::string& path);

struct RunOutcome {
  FitReport report;
  std::string document;
};

/// load -> optional PCA -> fit -> report document, written atomically to
/// `manifest.output` unless that is empty.
RunOutcome run(const RunManifest& manifest);

/// `fractions=0,0.1;noise=0,0.5;betas=0,auto:halves,1;classes=0,2;reps=10`.
/// Missing keys default to fractions=0, noise=0, betas=1, all classes, reps=10.
ProtocolGrid parse_grid_spec(const std::string& spec);

struct GridOutcome {
  std::vector<GridRow> rows;
  std::string table;
};

/// Loads the manifest input with its label column as ground truth (every row
/// must be labeled), runs the grid and writes the table to `manifest.output`
/// unless that is empty.
GridOutcome run_grid(const RunManifest& manifest, const std::string& spec);

}  // namespace cecib
