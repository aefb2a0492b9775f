#ifndef MSN_H
#define MSN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsnStatus {
  MSN_STATUS_OK = 0,
  MSN_STATUS_NULL_POINTER = 1,
  MSN_STATUS_INVALID_ARGUMENT = 2,
  MSN_STATUS_INVALID_CONFIG = 3,
  MSN_STATUS_DIMENSION_MISMATCH = 4,
  MSN_STATUS_NON_FINITE_VALUE = 5,
  MSN_STATUS_PARSE_ERROR = 6,
  MSN_STATUS_IO_ERROR = 7,
  MSN_STATUS_UNKNOWN_NAME = 8,
  /**
   * A call was made in the wrong order, e.g. asking for the elite before
   * any rewards were reported.
   */
  MSN_STATUS_INVALID_STATE = 9,
  MSN_STATUS_PANIC = 10,
} MsnStatus;

/**
 * Optimizer hyperparameters.
 */
typedef struct MsnConfigHandle MsnConfigHandle;

/**
 * A fixed-topology network; parameters live outside it.
 */
typedef struct MsnNetwork MsnNetwork;

/**
 * Ask/tell optimizer: read candidates with [`msn_optimizer_candidate`],
 * evaluate them however you like, report rewards (higher is better) with
 * [`msn_optimizer_tell`].
 */
typedef struct MsnOptimizer MsnOptimizer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *msn_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *msn_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed. NULL is ignored.
 */
void msn_string_free(char *s);

/**
 * Canberra distance between two vectors of length `len`.
 *
 * # Safety
 * `x` and `y` must point to `len` readable doubles; `out` must be writable.
 */
enum MsnStatus msn_canberra(const double *x, const double *y, size_t len, double *out);

/**
 * Value of the named benchmark function at `(x, y)`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum MsnStatus msn_benchmark_eval(const char *name, double x, double y, double *out);

/**
 * Known global minimum of the named benchmark function.
 *
 * # Safety
 * `name` must be a NUL-terminated string; the outputs must be writable.
 */
enum MsnStatus msn_benchmark_optimum(const char *name, double *value, double *x, double *y);

/**
 * Default hyperparameters. Never NULL.
 */
struct MsnConfigHandle *msn_config_default(void);

/**
 * Parse hyperparameters from JSON; missing fields take their defaults.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MsnStatus msn_config_from_json(const char *json, struct MsnConfigHandle **out);

/**
 * Hyperparameters as a JSON string, to be released with
 * [`msn_string_free`].
 *
 * # Safety
 * `config` must be a live handle; `out` must be writable.
 */
enum MsnStatus msn_config_to_json(const struct MsnConfigHandle *config, char **out);

/**
 * # Safety
 * `config` must come from this library and not have been freed. NULL is
 * ignored.
 */
void msn_config_free(struct MsnConfigHandle *config);

/**
 * Build a network from its JSON layer description.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MsnStatus msn_network_from_json(const char *json, struct MsnNetwork **out);

/**
 * The 2-input, 2-output benchmark network. Never NULL.
 */
struct MsnNetwork *msn_network_benchmark(void);

/**
 * # Safety
 * `net` must be a live handle or NULL (which yields 0).
 */
size_t msn_network_parameter_count(const struct MsnNetwork *net);

/**
 * # Safety
 * `net` must be a live handle or NULL (which yields 0).
 */
size_t msn_network_input_len(const struct MsnNetwork *net);

/**
 * # Safety
 * `net` must be a live handle or NULL (which yields 0).
 */
size_t msn_network_output_len(const struct MsnNetwork *net);

/**
 * Seeded Xavier-normal parameters; `len` must equal the parameter count.
 *
 * # Safety
 * `net` must be a live handle; `out` must point to `len` writable doubles.
 */
enum MsnStatus msn_network_init_params(const struct MsnNetwork *net,
                                       uint64_t seed,
                                       double *out,
                                       size_t len);

/**
 * Forward pass of one input.
 *
 * # Safety
 * Pointers must reference the stated number of doubles; `output_len` must
 * equal the network's output length.
 */
enum MsnStatus msn_network_forward(const struct MsnNetwork *net,
                                   const double *params,
                                   size_t params_len,
                                   const double *input,
                                   size_t input_len,
                                   double *output,
                                   size_t output_len);

/**
 * # Safety
 * `net` must come from this library and not have been freed. NULL is
 * ignored.
 */
void msn_network_free(struct MsnNetwork *net);

/**
 * Optimizer whose first pool is drawn from `net`'s initialization scheme.
 *
 * # Safety
 * `config` and `net` must be live handles; `out` must be writable.
 */
enum MsnStatus msn_optimizer_new(const struct MsnConfigHandle *config,
                                 const struct MsnNetwork *net,
                                 uint64_t seed,
                                 struct MsnOptimizer **out);

/**
 * Optimizer starting from caller-supplied candidates: `pool` holds
 * `pool_size` rows of `dim` doubles, row-major.
 *
 * # Safety
 * `config` must be a live handle; `pool` must point to `pool_size * dim`
 * readable doubles; `out` must be writable.
 */
enum MsnStatus msn_optimizer_new_with_pool(const struct MsnConfigHandle *config,
                                           const double *pool,
                                           size_t pool_size,
                                           size_t dim,
                                           uint64_t seed,
                                           struct MsnOptimizer **out);

/**
 * # Safety
 * `opt` must be a live handle or NULL (which yields 0).
 */
size_t msn_optimizer_pool_size(const struct MsnOptimizer *opt);

/**
 * # Safety
 * `opt` must be a live handle or NULL (which yields 0).
 */
size_t msn_optimizer_dim(const struct MsnOptimizer *opt);

/**
 * Generations completed so far.
 *
 * # Safety
 * `opt` must be a live handle or NULL (which yields 0).
 */
size_t msn_optimizer_generation(const struct MsnOptimizer *opt);

/**
 * Copy candidate `index` of the current pool into `out` (`len` = dim).
 *
 * # Safety
 * `opt` must be a live handle; `out` must point to `len` writable doubles.
 */
enum MsnStatus msn_optimizer_candidate(const struct MsnOptimizer *opt,
                                       size_t index,
                                       double *out,
                                       size_t len);

/**
 * Report one reward per candidate, in pool order, and advance a
 * generation.
 *
 * # Safety
 * `opt` must be a live handle; `rewards` must point to `len` doubles.
 */
enum MsnStatus msn_optimizer_tell(struct MsnOptimizer *opt, const double *rewards, size_t len);

/**
 * Best candidate reported so far and its reward.
 *
 * # Safety
 * `opt` must be a live handle; `out` must point to `len` writable doubles;
 * `reward` must be writable.
 */
enum MsnStatus msn_optimizer_elite(const struct MsnOptimizer *opt,
                                   double *out,
                                   size_t len,
                                   double *reward);

/**
 * Current integrity in `[0, 1]`.
 *
 * # Safety
 * `opt` must be a live handle or NULL (which yields NaN).
 */
double msn_optimizer_integrity(const struct MsnOptimizer *opt);

/**
 * # Safety
 * `opt` must come from this library and not have been freed. NULL is
 * ignored.
 */
void msn_optimizer_free(struct MsnOptimizer *opt);

/**
 * Run a whole experiment described by JSON and return the result record
 * as JSON in `out` (release with [`msn_string_free`]). Individual trial
 * failures are reported inside the record, not as a status.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum MsnStatus msn_run_experiment_json(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSN_H */
