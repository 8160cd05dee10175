#ifndef EVOBOSS_H
#define EVOBOSS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Longest variant word a record can hold, including the terminating NUL.
 */
#define EVOBOSS_VARIANT_CAPACITY 16

typedef enum EvobossGain {
  EVOBOSS_GAIN_LINEAR = 0,
  EVOBOSS_GAIN_EXPONENTIAL = 1,
} EvobossGain;

typedef enum EvobossStatus {
  EVOBOSS_STATUS_OK = 0,
  EVOBOSS_STATUS_NULL_POINTER = 1,
  EVOBOSS_STATUS_INVALID_ARGUMENT = 2,
  EVOBOSS_STATUS_IO = 3,
  EVOBOSS_STATUS_FORMAT = 4,
  EVOBOSS_STATUS_BUDGET = 5,
  EVOBOSS_STATUS_NUMERICAL = 6,
  EVOBOSS_STATUS_PANIC = 7,
} EvobossStatus;

typedef struct EvobossLandscape EvobossLandscape;

typedef struct EvobossStore EvobossStore;

typedef struct EvobossTrace EvobossTrace;

/**
 * One screened variant of a trace.
 */
typedef struct EvobossRecord {
  size_t step;
  /**
   * NUL-terminated variant word.
   */
  char variant[EVOBOSS_VARIANT_CAPACITY];
  double fitness;
  double best;
  /**
   * NaN when the screen was not chosen by a fitted model.
   */
  double theta;
} EvobossRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *evoboss_last_error_message(void);

/**
 * Loads a `variant,fitness` CSV. `meta_path` may be NULL.
 *
 * # Safety
 * Path arguments must be NUL-terminated strings; `out` must be writable.
 */
enum EvobossStatus evoboss_landscape_load(const char *csv_path,
                                          const char *meta_path,
                                          struct EvobossLandscape **out);

/**
 * Number of mutated positions, or 0 for NULL.
 *
 * # Safety
 * `landscape` must be NULL or a live handle.
 */
size_t evoboss_landscape_positions(const struct EvobossLandscape *landscape);

/**
 * Fitness of `word`; unmeasured variants have fitness 0.
 *
 * # Safety
 * `landscape` must be a live handle, `word` a NUL-terminated string and `out` writable.
 */
enum EvobossStatus evoboss_landscape_fitness(const struct EvobossLandscape *landscape,
                                             const char *word,
                                             double *out);

/**
 * # Safety
 * `landscape` must be NULL or a handle not yet freed.
 */
void evoboss_landscape_free(struct EvobossLandscape *landscape);

/**
 * Loads a store from its index and matrix files.
 *
 * # Safety
 * Path arguments must be NUL-terminated strings; `out` must be writable.
 */
enum EvobossStatus evoboss_store_load(const char *index_path,
                                      const char *matrix_path,
                                      struct EvobossStore **out);

/**
 * Seeded synthetic store over all `20^n` variants.
 *
 * # Safety
 * `out` must be writable.
 */
enum EvobossStatus evoboss_store_synthetic(size_t n,
                                           size_t dim,
                                           uint64_t seed,
                                           struct EvobossStore **out);

/**
 * One-hot store over all `20^n` variants.
 *
 * # Safety
 * `out` must be writable.
 */
enum EvobossStatus evoboss_store_onehot(size_t n, struct EvobossStore **out);

/**
 * # Safety
 * `store` must be a live handle; path arguments NUL-terminated strings.
 */
enum EvobossStatus evoboss_store_save(const struct EvobossStore *store,
                                      const char *index_path,
                                      const char *matrix_path);

/**
 * # Safety
 * `store` must be NULL or a live handle.
 */
size_t evoboss_store_len(const struct EvobossStore *store);

/**
 * # Safety
 * `store` must be NULL or a live handle.
 */
size_t evoboss_store_dim(const struct EvobossStore *store);

/**
 * # Safety
 * `store` must be NULL or a handle not yet freed.
 */
void evoboss_store_free(struct EvobossStore *store);

/**
 * Embedding-space Bayesian optimization with the default configuration.
 * `start` may be NULL for the wild type.
 *
 * # Safety
 * Handles must be live; `start` NULL or NUL-terminated; `out` writable.
 */
enum EvobossStatus evoboss_run_boes(const struct EvobossLandscape *landscape,
                                    const struct EvobossStore *store,
                                    const char *start,
                                    size_t budget,
                                    uint64_t seed,
                                    struct EvobossTrace **out);

/**
 * Single-mutation walk. `start` may be NULL for the wild type.
 *
 * # Safety
 * `landscape` must be live; `start` NULL or NUL-terminated; `out` writable.
 */
enum EvobossStatus evoboss_run_smw(const struct EvobossLandscape *landscape,
                                   const char *start,
                                   size_t budget,
                                   uint64_t seed,
                                   struct EvobossTrace **out);

/**
 * Single-mutant screen followed by recombination of the `top_k` best residues per position.
 *
 * # Safety
 * `landscape` must be live; `start` NULL or NUL-terminated; `out` writable.
 */
enum EvobossStatus evoboss_run_recombination(const struct EvobossLandscape *landscape,
                                             const char *start,
                                             size_t budget,
                                             size_t top_k,
                                             uint64_t seed,
                                             struct EvobossTrace **out);

/**
 * # Safety
 * `landscape` must be live; `out` writable.
 */
enum EvobossStatus evoboss_run_random(const struct EvobossLandscape *landscape,
                                      size_t budget,
                                      uint64_t seed,
                                      struct EvobossTrace **out);

/**
 * Reads a JSON-lines trace.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` writable.
 */
enum EvobossStatus evoboss_trace_read(const char *path, struct EvobossTrace **out);

/**
 * Number of screens in the trace, or 0 for NULL.
 *
 * # Safety
 * `trace` must be NULL or a live handle.
 */
size_t evoboss_trace_len(const struct EvobossTrace *trace);

/**
 * # Safety
 * `trace` must be a live handle and `out` writable.
 */
enum EvobossStatus evoboss_trace_record(const struct EvobossTrace *trace,
                                        size_t index,
                                        struct EvobossRecord *out);

/**
 * # Safety
 * `trace` must be a live handle and `path` NUL-terminated.
 */
enum EvobossStatus evoboss_trace_write(const struct EvobossTrace *trace, const char *path);

/**
 * # Safety
 * `trace` must be NULL or a handle not yet freed.
 */
void evoboss_trace_free(struct EvobossTrace *trace);

/**
 * NDCG of the ranking induced by `predicted` against `truth`, both of length `len`.
 *
 * # Safety
 * `predicted` and `truth` must point to `len` readable doubles; `out` must be writable.
 */
enum EvobossStatus evoboss_ndcg(const double *predicted,
                                const double *truth,
                                size_t len,
                                enum EvobossGain gain,
                                double *out);

/**
 * Expected improvement over `f_best` of a Gaussian with mean `mu` and variance `var`.
 */
double evoboss_expected_improvement(double mu, double var, double f_best);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVOBOSS_H */
