/*
 * cecib: semi-supervised cross-entropy clustering with partition-level side
 * information. C interface over the C++ core.
 *
 * All functions that can fail return a cecib_status; on failure a message is
 * available from cecib_last_error() on the calling thread until the next call.
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. *_free(NULL) is a no-op.
 */
#ifndef CECIB_CECIB_H
#define CECIB_CECIB_H

#include <stddef.h>
#include <stdint.h>

#if defined(CECIB_BUILDING_LIBRARY)
#define CECIB_API __attribute__((visibility("default")))
#else
#define CECIB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cecib_status {
  CECIB_OK = 0,
  CECIB_ERR_INVALID_INPUT = 1,
  CECIB_ERR_EMPTY_CLUSTER = 2,
  CECIB_ERR_DEGENERATE_MODEL = 3,
  CECIB_ERR_CONFIGURATION = 4,
  CECIB_ERR_PARSE = 5,
  CECIB_ERR_PRECONDITION = 6,
  CECIB_ERR_UNSUPPORTED = 7,
  CECIB_ERR_IO = 8,
  CECIB_ERR_NULL_ARGUMENT = 9,
  CECIB_ERR_INTERNAL = 10
} cecib_status;

typedef struct cecib_dataset cecib_dataset;
typedef struct cecib_fit_config cecib_fit_config;
typedef struct cecib_fit_report cecib_fit_report;

typedef struct cecib_cost {
  double partition_term;
  double model_term;
  double side_term; /* H(Z|Y), before multiplication by beta */
  double beta;
  double total;
} cecib_cost;

CECIB_API const char* cecib_version(void);
CECIB_API const char* cecib_status_name(cecib_status status);
CECIB_API const char* cecib_last_error(void);

/* ---- datasets -------------------------------------------------------- */

/* label_column may be NULL for unlabeled data. */
CECIB_API cecib_status cecib_dataset_load_csv(const char* path, const char* label_column,
                                              cecib_dataset** out);
/* values: rows x dims, row-major. labels: NULL or `rows` entries, negative
 * meaning unlabeled, otherwise < categories. */
CECIB_API cecib_status cecib_dataset_from_array(const double* values, size_t rows, size_t dims,
                                                const int64_t* labels, size_t categories,
                                                cecib_dataset** out);
CECIB_API void cecib_dataset_free(cecib_dataset* dataset);
CECIB_API size_t cecib_dataset_rows(const cecib_dataset* dataset);
CECIB_API size_t cecib_dataset_dims(const cecib_dataset* dataset);
CECIB_API size_t cecib_dataset_labeled(const cecib_dataset* dataset);
CECIB_API size_t cecib_dataset_categories(const cecib_dataset* dataset);
/* Replaces the features by their projection on the top `dims` principal axes. */
CECIB_API cecib_status cecib_dataset_pca(cecib_dataset* dataset, size_t dims);

/* ---- fitting --------------------------------------------------------- */

CECIB_API cecib_status cecib_fit_config_create(cecib_fit_config** out);
CECIB_API void cecib_fit_config_free(cecib_fit_config* config);
CECIB_API cecib_status cecib_fit_config_set_beta(cecib_fit_config* config, double beta);
CECIB_API cecib_status cecib_fit_config_set_k_init(cecib_fit_config* config, size_t k_init);
CECIB_API cecib_status cecib_fit_config_set_epsilon(cecib_fit_config* config, double epsilon);
CECIB_API cecib_status cecib_fit_config_set_restarts(cecib_fit_config* config, size_t restarts);
CECIB_API cecib_status cecib_fit_config_set_max_epochs(cecib_fit_config* config, size_t epochs);
CECIB_API cecib_status cecib_fit_config_set_seed(cecib_fit_config* config, uint64_t seed);
/* Negative ridge selects the data-dependent default. */
CECIB_API cecib_status cecib_fit_config_set_ridge(cecib_fit_config* config, double ridge);

CECIB_API cecib_status cecib_fit(const cecib_dataset* dataset, const cecib_fit_config* config,
                                 cecib_fit_report** out);
CECIB_API void cecib_fit_report_free(cecib_fit_report* report);
CECIB_API size_t cecib_fit_report_rows(const cecib_fit_report* report);
CECIB_API size_t cecib_fit_report_k(const cecib_fit_report* report);
CECIB_API size_t cecib_fit_report_epochs(const cecib_fit_report* report);
CECIB_API size_t cecib_fit_report_restart_index(const cecib_fit_report* report);
/* Copies min(capacity, rows) cluster indices into `out`. */
CECIB_API cecib_status cecib_fit_report_assignment(const cecib_fit_report* report, size_t* out,
                                                   size_t capacity);
CECIB_API cecib_status cecib_fit_report_cost(const cecib_fit_report* report, cecib_cost* out);

/* ---- theory & metrics ------------------------------------------------ */

CECIB_API double cecib_beta0_gaussian_halves(void);
/* "auto:halves" or a non-negative number. */
CECIB_API cecib_status cecib_parse_beta(const char* text, double* out);
CECIB_API cecib_status cecib_nmi(const size_t* a, const size_t* b, size_t n, double* out);

/* ---- manifest runs (what the command-line tool drives) ---------------- */

typedef struct cecib_run_options {
  const char* input;        /* required */
  const char* label_column; /* NULL: no side information */
  const char* beta;         /* NULL means "1" */
  size_t k_init;
  double epsilon;
  size_t restarts;
  size_t max_epochs;
  uint64_t seed;
  double ridge;      /* negative: data-dependent default */
  size_t pca_dims;   /* 0: no PCA */
  const char* output; /* NULL or "": write to stdout via the callback below */
} cecib_run_options;

/* Receives the rendered document when no output path is set. */
typedef void (*cecib_sink)(const char* data, size_t size, void* user);

CECIB_API void cecib_run_options_init(cecib_run_options* options);
CECIB_API cecib_status cecib_run(const cecib_run_options* options, cecib_sink sink, void* user);
/* grid_spec e.g. "fractions=0,0.1,0.2,0.3;noise=0;betas=0,auto:halves,1;reps=10". */
CECIB_API cecib_status cecib_run_grid(const cecib_run_options* options, const char* grid_spec,
                                      cecib_sink sink, void* user);
/* Re-runs the manifest recorded in a report; output_path overrides the
 * recorded output when non-NULL. */
CECIB_API cecib_status cecib_replay(const char* report_path, const char* output_path,
                                    cecib_sink sink, void* user);

#ifdef __cplusplus
}
#endif

#endif /* CECIB_CECIB_H */
