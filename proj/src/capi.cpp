#include "cecib/cecib.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "cecib/error.hpp"
#include "cecib/eval.hpp"
#include "cecib/io.hpp"
#include "cecib/optimizer.hpp"
#include "cecib/report.hpp"
#include "cecib/theory.hpp"

struct cecib_dataset {
  cecib::LoadedData loaded;
};

struct cecib_fit_config {
  cecib::FitConfig config;
};

struct cecib_fit_report {
  cecib::FitReport report;
};

namespace {

thread_local std::string last_error;

cecib_status status_of(cecib::ErrorKind kind) {
  using cecib::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidInput: return CECIB_ERR_INVALID_INPUT;
    case ErrorKind::EmptyCluster: return CECIB_ERR_EMPTY_CLUSTER;
    case ErrorKind::DegenerateModel: return CECIB_ERR_DEGENERATE_MODEL;
    case ErrorKind::Configuration: return CECIB_ERR_CONFIGURATION;
    case ErrorKind::Parse: return CECIB_ERR_PARSE;
    case ErrorKind::Precondition: return CECIB_ERR_PRECONDITION;
    case ErrorKind::Unsupported: return CECIB_ERR_UNSUPPORTED;
    case ErrorKind::Io: return CECIB_ERR_IO;
  }
  return CECIB_ERR_INTERNAL;
}

template <class F>
cecib_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return CECIB_OK;
  } catch (const cecib::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CECIB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CECIB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return CECIB_ERR_INTERNAL;
  }
}

cecib_status null_argument(const char* name) {
  last_error = std::string(name) + " must not be NULL";
  return CECIB_ERR_NULL_ARGUMENT;
}

cecib::RunManifest manifest_from(const cecib_run_options& o) {
  cecib::RunManifest m;
  if (o.input) m.input = o.input;
  if (o.label_column) m.label_column = o.label_column;
  m.beta_text = o.beta ? o.beta : "1";
  m.beta = cecib::parse_beta(m.beta_text);
  m.k_init = o.k_init;
  m.epsilon = o.epsilon;
  m.restarts = o.restarts;
  m.max_epochs = o.max_epochs;
  m.seed = o.seed;
  if (o.ridge >= 0.0) m.ridge = o.ridge;
  if (o.pca_dims > 0) m.pca_dims = o.pca_dims;
  if (o.output) m.output = o.output;
  return m;
}

void emit(const cecib::RunManifest& m, const std::string& text, cecib_sink sink, void* user) {
  if (m.output.empty() && sink) sink(text.data(), text.size(), user);
}

}  // namespace

extern "C" {

const char* cecib_version(void) { return "0.1.0"; }

const char* cecib_status_name(cecib_status status) {
  switch (status) {
    case CECIB_OK: return "ok";
    case CECIB_ERR_INVALID_INPUT: return "invalid-input";
    case CECIB_ERR_EMPTY_CLUSTER: return "empty-cluster";
    case CECIB_ERR_DEGENERATE_MODEL: return "degenerate-model";
    case CECIB_ERR_CONFIGURATION: return "configuration";
    case CECIB_ERR_PARSE: return "parse";
    case CECIB_ERR_PRECONDITION: return "precondition";
    case CECIB_ERR_UNSUPPORTED: return "unsupported";
    case CECIB_ERR_IO: return "io";
    case CECIB_ERR_NULL_ARGUMENT: return "null-argument";
    case CECIB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cecib_last_error(void) { return last_error.c_str(); }

cecib_status cecib_dataset_load_csv(const char* path, const char* label_column,
                                    cecib_dataset** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::optional<std::string> label;
    if (label_column) label = label_column;
    auto* ds = new cecib_dataset{cecib::load_csv(path, label)};
    *out = ds;
  });
}

cecib_status cecib_dataset_from_array(const double* values, size_t rows, size_t dims,
                                      const int64_t* labels, size_t categories,
                                      cecib_dataset** out) {
  if (!values) return null_argument("values");
  if (!out) return null_argument("out");
  return guarded([&] {
    cecib::LoadedData loaded;
    loaded.data.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < dims; ++j) {
        loaded.data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            values[i * dims + j];
      }
    }
    for (size_t j = 0; j < dims; ++j) loaded.data.feature_names.push_back("x" + std::to_string(j));
    cecib::validate(loaded.data);
    loaded.side.labels.resize(rows);
    loaded.side.categories = categories;
    if (labels) {
      for (size_t i = 0; i < rows; ++i) {
        if (labels[i] >= 0) loaded.side.labels[i] = static_cast<size_t>(labels[i]);
      }
    }
    cecib::validate(loaded.side);
    *out = new cecib_dataset{std::move(loaded)};
  });
}

void cecib_dataset_free(cecib_dataset* dataset) { delete dataset; }

size_t cecib_dataset_rows(const cecib_dataset* d) { return d ? d->loaded.data.rows() : 0; }
size_t cecib_dataset_dims(const cecib_dataset* d) { return d ? d->loaded.data.dims() : 0; }
size_t cecib_dataset_labeled(const cecib_dataset* d) {
  return d ? d->loaded.side.labeled_count() : 0;
}
size_t cecib_dataset_categories(const cecib_dataset* d) {
  return d ? d->loaded.side.categories : 0;
}

cecib_status cecib_dataset_pca(cecib_dataset* dataset, size_t dims) {
  if (!dataset) return null_argument("dataset");
  return guarded([&] { dataset->loaded.data = cecib::pca_reduce(dataset->loaded.data, dims); });
}

cecib_status cecib_fit_config_create(cecib_fit_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new cecib_fit_config{}; });
}

void cecib_fit_config_free(cecib_fit_config* config) { delete config; }

#define CECIB_CONFIG_SETTER(name, type, field)                          \
  cecib_status cecib_fit_config_set_##name(cecib_fit_config* c, type v) { \
    if (!c) return null_argument("config");                             \
    c->config.field = v;                                                \
    return CECIB_OK;                                                    \
  }

CECIB_CONFIG_SETTER(beta, double, beta)
CECIB_CONFIG_SETTER(k_init, size_t, k_init)
CECIB_CONFIG_SETTER(epsilon, double, epsilon)
CECIB_CONFIG_SETTER(restarts, size_t, restarts)
CECIB_CONFIG_SETTER(max_epochs, size_t, max_epochs)
CECIB_CONFIG_SETTER(seed, uint64_t, seed)

#undef CECIB_CONFIG_SETTER

cecib_status cecib_fit_config_set_ridge(cecib_fit_config* c, double ridge) {
  if (!c) return null_argument("config");
  if (ridge < 0.0) {
    c->config.ridge.reset();
  } else {
    c->config.ridge = ridge;
  }
  return CECIB_OK;
}

cecib_status cecib_fit(const cecib_dataset* dataset, const cecib_fit_config* config,
                       cecib_fit_report** out) {
  if (!dataset) return null_argument("dataset");
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto report = cecib::fit(dataset->loaded.data, dataset->loaded.side, config->config);
    *out = new cecib_fit_report{std::move(report)};
  });
}

void cecib_fit_report_free(cecib_fit_report* report) { delete report; }

size_t cecib_fit_report_rows(const cecib_fit_report* r) {
  return r ? r->report.clustering.size() : 0;
}
size_t cecib_fit_report_k(const cecib_fit_report* r) { return r ? r->report.clustering.k : 0; }
size_t cecib_fit_report_epochs(const cecib_fit_report* r) { return r ? r->report.epochs_run : 0; }
size_t cecib_fit_report_restart_index(const cecib_fit_report* r) {
  return r ? r->report.restart_index : 0;
}

cecib_status cecib_fit_report_assignment(const cecib_fit_report* report, size_t* out,
                                         size_t capacity) {
  if (!report) return null_argument("report");
  if (!out && capacity > 0) return null_argument("out");
  const auto& a = report->report.clustering.assignment;
  for (size_t i = 0; i < a.size() && i < capacity; ++i) out[i] = a[i];
  return CECIB_OK;
}

cecib_status cecib_fit_report_cost(const cecib_fit_report* report, cecib_cost* out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  const auto& c = report->report.cost;
  *out = cecib_cost{c.partition_term, c.model_term, c.side_term, c.beta, c.total};
  return CECIB_OK;
}

double cecib_beta0_gaussian_halves(void) { return cecib::beta0_gaussian_halves(); }

cecib_status cecib_parse_beta(const char* text, double* out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] { *out = cecib::parse_beta(text); });
}

cecib_status cecib_nmi(const size_t* a, const size_t* b, size_t n, double* out) {
  if ((!a || !b) && n > 0) return null_argument("a/b");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto to_clustering = [n](const size_t* labels) {
      cecib::Clustering c{std::vector<std::size_t>(labels, labels + n), 0};
      for (size_t v : c.assignment) c.k = std::max(c.k, v + 1);
      return c;
    };
    *out = cecib::nmi(to_clustering(a), to_clustering(b));
  });
}

void cecib_run_options_init(cecib_run_options* o) {
  if (!o) return;
  const cecib::RunManifest defaults;
  *o = cecib_run_options{};
  o->beta = "1";
  o->k_init = defaults.k_init;
  o->epsilon = defaults.epsilon;
  o->restarts = defaults.restarts;
  o->max_epochs = defaults.max_epochs;
  o->seed = defaults.seed;
  o->ridge = -1.0;
}

cecib_status cecib_run(const cecib_run_options* options, cecib_sink sink, void* user) {
  if (!options) return null_argument("options");
  if (!options->input) return null_argument("options->input");
  return guarded([&] {
    const auto manifest = manifest_from(*options);
    const auto outcome = cecib::run(manifest);
    emit(manifest, outcome.document, sink, user);
  });
}

cecib_status cecib_run_grid(const cecib_run_options* options, const char* grid_spec,
                            cecib_sink sink, void* user) {
  if (!options) return null_argument("options");
  if (!options->input) return null_argument("options->input");
  if (!grid_spec) return null_argument("grid_spec");
  return guarded([&] {
    const auto manifest = manifest_from(*options);
    const auto outcome = cecib::run_grid(manifest, grid_spec);
    emit(manifest, outcome.table, sink, user);
  });
}

cecib_status cecib_replay(const char* report_path, const char* output_path, cecib_sink sink,
                          void* user) {
  if (!report_path) return null_argument("report_path");
  return guarded([&] {
    auto manifest = cecib::read_report_file(report_path).manifest;
    if (output_path) manifest.output = output_path;
    const auto outcome = cecib::run(manifest);
    emit(manifest, outcome.document, sink, user);
  });
}

}  // extern "C"
