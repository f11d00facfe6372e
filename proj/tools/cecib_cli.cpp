// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cecib/cecib.h"

namespace {

void to_stdout(const char* data, size_t size, void*) { std::fwrite(data, 1, size, stdout); }

int report_failure(cecib_status status) {
  std::cerr << "cecib: error [" << cecib_status_name(status) << "]: " << cecib_last_error()
            << "\n";
  return 1 + static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised cross-entropy clustering with partition-level side information"};

  cecib_run_options options;
  cecib_run_options_init(&options);

  std::string input;
  std::optional<std::string> label_col;
  std::string beta = "1";
  std::optional<double> ridge;
  std::size_t pca = 0;
  std::string output;
  std::string grid;
  std::string replay;

  app.add_option("--input", input, "Comma-separated data file with a header row");
  app.add_option("--label-col", label_col, "Column holding categories (empty cell = unlabeled)");
  app.add_option("--beta", beta, "Side-information weight, a number or auto:halves")
      ->capture_default_str();
  app.add_option("--k-init", options.k_init, "Initial number of clusters")->capture_default_str();
  app.add_option("--epsilon", options.epsilon, "Cluster deletion threshold (fraction of points)")
      ->capture_default_str();
  app.add_option("--restarts", options.restarts, "Number of random restarts")
      ->capture_default_str();
  app.add_option("--max-epochs", options.max_epochs, "Epoch limit per restart")
      ->capture_default_str();
  app.add_option("--seed", options.seed, "Master random seed")->capture_default_str();
  app.add_option("--ridge", ridge, "Covariance ridge (default: 1e-6 * trace(cov) / N)");
  app.add_option("--pca", pca, "Project onto this many principal components first");
  app.add_option("--output", output, "Output path (default: stdout)");
  app.add_option("--grid", grid,
                 "Run a side-information protocol grid, e.g. "
                 "'fractions=0,0.1,0.2,0.3;noise=0;betas=0,auto:halves,1;reps=10'");
  app.add_option("--replay", replay, "Re-run the manifest stored in a report document");

  CLI11_PARSE(app, argc, argv);

  const char* out_path = output.empty() ? nullptr : output.c_str();
  if (!replay.empty()) {
    const cecib_status s = cecib_replay(replay.c_str(), out_path, to_stdout, nullptr);
    return s == CECIB_OK ? 0 : report_failure(s);
  }
  if (input.empty()) {
    std::cerr << "cecib: --input is required\n" << app.help();
    return 2;
  }

  options.input = input.c_str();
  options.label_column = label_col ? label_col->c_str() : nullptr;
  options.beta = beta.c_str();
  options.ridge = ridge ? *ridge : -1.0;
  if (ridge && *ridge < 0.0) {
    std::cerr << "cecib: --ridge must be non-negative\n";
    return 2;
  }
  options.pca_dims = pca;
  options.output = out_path;

  const cecib_status s = grid.empty()
                             ? cecib_run(&options, to_stdout, nullptr)
                             : cecib_run_grid(&options, grid.c_str(), to_stdout, nullptr);
  return s == CECIB_OK ? 0 : report_failure(s);
}
