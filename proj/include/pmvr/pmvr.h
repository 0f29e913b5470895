/* C interface to the pmvr library. Every function returns a pmvr_status;
 * on failure pmvr_last_error() describes the cause for the calling thread. */
#ifndef PMVR_PMVR_H
#define PMVR_PMVR_H

#include <stddef.h>
#include <stdint.h>

#if defined(PMVR_BUILDING_LIBRARY)
#define PMVR_API __attribute__((visibility("default")))
#else
#define PMVR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmvr_status {
  PMVR_OK = 0,
  PMVR_ERR_VALIDATION = 1, /* bad configuration or argument value */
  PMVR_ERR_SHAPE = 2,
  PMVR_ERR_NUMERIC = 3,
  PMVR_ERR_CONVERGENCE = 4,
  PMVR_ERR_IO = 5,
  PMVR_ERR_CHECK_FAILED = 6, /* a self-check property failed */
  PMVR_ERR_INTERNAL = 7
} pmvr_status;

/* Receives one line of progress or report text (no trailing newline). */
typedef void (*pmvr_line_fn)(const char* line, void* user);

PMVR_API const char* pmvr_version(void);
/* Message of the last failed call on this thread; "" when none. */
PMVR_API const char* pmvr_last_error(void);
/* Config field locator of the last validation error (e.g. "$.eps"); "" when none. */
PMVR_API const char* pmvr_last_error_field(void);

/* ---- configured runs ---- */

typedef struct pmvr_config pmvr_config;

PMVR_API pmvr_status pmvr_config_load(const char* path, pmvr_config** out);
PMVR_API pmvr_status pmvr_config_parse(const char* json_text, pmvr_config** out);
PMVR_API void pmvr_config_free(pmvr_config* config);
PMVR_API pmvr_status pmvr_config_set_seed(pmvr_config* config, uint64_t seed);
PMVR_API pmvr_status pmvr_config_set_reps(pmvr_config* config, uint64_t reps);
PMVR_API pmvr_status pmvr_config_set_threads(pmvr_config* config, uint64_t threads);
/* Canonical JSON of the validated config. Writes at most `cap` bytes including
 * the terminator into `buf` and stores the full length in *needed. */
PMVR_API pmvr_status pmvr_config_to_json(const pmvr_config* config, char* buf, size_t cap,
                                         size_t* needed);

/* Runs all repetitions and writes traces, aggregate and metadata. `out_dir`
 * may be NULL: the config's "out", then $PMVR_OUT_DIR, then "runs". */
PMVR_API pmvr_status pmvr_run_config(const pmvr_config* config, const char* out_dir,
                                     pmvr_line_fn log, void* user);

/* suite: "oracles", "gradients", "subsolver" or "all". */
PMVR_API pmvr_status pmvr_check(const char* suite, pmvr_line_fn report, void* user);

/* experiment: "matrix", "mv-portfolio", "md-portfolio"; scale: "desk" or "paper".
 * data_path is required for portfolio experiments at paper scale. reps = 0
 * keeps the scale's default. */
PMVR_API pmvr_status pmvr_reproduce(const char* experiment, const char* scale,
                                    const char* data_path, const char* out_dir, uint64_t threads,
                                    uint64_t reps, pmvr_line_fn log, void* user);

/* ---- problems and direct solves ---- */

typedef struct pmvr_problem pmvr_problem;

PMVR_API pmvr_status pmvr_problem_mean_variance_synthetic(uint64_t assets, uint64_t periods,
                                                          uint64_t data_seed, double lambda,
                                                          pmvr_problem** out);
PMVR_API pmvr_status pmvr_problem_mean_deviation_synthetic(uint64_t assets, uint64_t periods,
                                                           uint64_t data_seed, double lambda,
                                                           pmvr_problem** out);
/* Loads a Kenneth French industry file; drop_sentinels != 0 skips rows with
 * missing-value markers instead of failing. kind: 0 mean-variance, 1 mean-deviation. */
PMVR_API pmvr_status pmvr_problem_portfolio_file(const char* path, int kind, double lambda,
                                                 int drop_sentinels, pmvr_problem** out);
PMVR_API pmvr_status pmvr_problem_single_index(uint64_t rows, uint64_t cols, double radius,
                                               double sigma, uint64_t data_seed,
                                               pmvr_problem** out);
PMVR_API pmvr_status pmvr_problem_quadratic_toy(const double* center, size_t dim,
                                                double value_noise, double outer_noise,
                                                pmvr_problem** out);
PMVR_API void pmvr_problem_free(pmvr_problem* problem);

/* Decision-variable shape; cols = 1 for vectors. */
PMVR_API pmvr_status pmvr_problem_shape(const pmvr_problem* problem, size_t* rows, size_t* cols);
PMVR_API pmvr_status pmvr_problem_depth(const pmvr_problem* problem, size_t* depth);
/* Default feasible start point, row-major, `len` = rows * cols. */
PMVR_API pmvr_status pmvr_problem_start(const pmvr_problem* problem, double* x, size_t len);
PMVR_API pmvr_status pmvr_problem_objective(const pmvr_problem* problem, const double* x,
                                            size_t len, double* value);
PMVR_API pmvr_status pmvr_problem_gradient(const pmvr_problem* problem, const double* x,
                                           size_t len, double* gradient);
PMVR_API pmvr_status pmvr_fw_gap(const pmvr_problem* problem, const double* x, size_t len,
                                 double* value);
PMVR_API pmvr_status pmvr_gradient_mapping(const pmvr_problem* problem, const double* x,
                                           size_t len, double beta, double* value);

typedef struct pmvr_solver_params {
  double eta;
  double alpha;
  uint64_t b0;
  uint64_t b1;
  uint64_t iterations;
  uint64_t inner_iterations; /* 0: plain LMO step; otherwise the quadratic subsolver */
  double coeff;              /* subsolver coefficient */
  uint64_t cadence;          /* 0: max(1, T / 200) */
  double beta;               /* gradient-mapping beta; <= 0 means 1 */
  int last_iterate;          /* nonzero: return x_{T+1} instead of a random iterate */
} pmvr_solver_params;

/* Fills the schedule of theorem 1..4 at accuracy eps with unit constants. */
PMVR_API pmvr_status pmvr_theorem_params(int theorem, double eps, pmvr_solver_params* out);

typedef struct pmvr_trace pmvr_trace;

typedef struct pmvr_trace_row {
  uint64_t iter;
  uint32_t stage;
  double seconds;
  uint64_t sfo;
  uint64_t lmo;
  double objective;
  double fw_gap;
  double grad_map;
  double beta;
  int has_opt_gap;
  double opt_gap;
} pmvr_trace_row;

PMVR_API pmvr_status pmvr_solve(const pmvr_problem* problem, const pmvr_solver_params* params,
                                uint64_t seed, pmvr_trace** out);
PMVR_API void pmvr_trace_free(pmvr_trace* trace);
PMVR_API size_t pmvr_trace_rows(const pmvr_trace* trace);
PMVR_API pmvr_status pmvr_trace_row_at(const pmvr_trace* trace, size_t index, pmvr_trace_row* row);
/* The returned iterate (x_tau or x_{T+1}). */
PMVR_API pmvr_status pmvr_trace_solution(const pmvr_trace* trace, double* x, size_t len);
PMVR_API pmvr_status pmvr_trace_write_csv(const pmvr_trace* trace, const char* path);

#ifdef __cplusplus
}
#endif

#endif
