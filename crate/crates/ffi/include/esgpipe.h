#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum EsgStatus {
  EsgStatus_Ok = 0,
  EsgStatus_NullPointer = 1,
  EsgStatus_InvalidArgument = 2,
  EsgStatus_Utf8Error = 3,
  EsgStatus_IoError = 4,
  EsgStatus_ParseError = 5,
  /**
   * The requested statistic is undefined for this input (for example
   * Fleiss' kappa when all votes fall into one category).
   */
  EsgStatus_Degenerate = 6,
  EsgStatus_InternalError = 7,
} EsgStatus;

/**
 * Opaque handle over a loaded dataset.
 */
typedef struct EsgDataset EsgDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; never freed.
 */
const char *esg_version(void);

/**
 * Detail message for the most recent error on this thread, or NULL when
 * the last call succeeded. Free with `esg_string_free`.
 */
char *esg_last_error_message(void);

/**
 * Free a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void esg_string_free(char *s);

/**
 * Cosine similarity of two equal-length vectors.
 *
 * # Safety
 * `a` and `b` must point to `len` readable doubles; `out` must be a valid
 * write target.
 */
enum EsgStatus esg_cosine_similarity(const double *a, const double *b, uintptr_t len, double *out);

/**
 * Fleiss' kappa over a row-major `subjects x categories` vote-count
 * matrix (constant rater count per subject).
 *
 * # Safety
 * `counts` must point to `subjects * categories` readable u64 values;
 * `out` must be a valid write target.
 */
enum EsgStatus esg_fleiss_kappa(const uint64_t *counts,
                                uintptr_t subjects,
                                uintptr_t categories,
                                double *out);

/**
 * Collapse a multi-select sentiment annotation to one value. The result
 * is written as -1 (negative), 0 (neutral) or +1 (positive).
 *
 * # Safety
 * `out` must be a valid write target.
 */
enum EsgStatus esg_simplify_sentiment(bool negative,
                                      bool neutral,
                                      bool positive,
                                      bool not_sure,
                                      int32_t *out);

/**
 * Greedy near-duplicate pass over one embedding per item. `vectors` is
 * row-major `items x dim`; `timestamps` are unix seconds; `kept_out[i]`
 * receives whether item `i` survives.
 *
 * # Safety
 * `vectors` must hold `items * dim` doubles, `timestamps` `items` values
 * and `kept_out` room for `items` booleans.
 */
enum EsgStatus esg_dedup_flat(const double *vectors,
                              uintptr_t items,
                              uintptr_t dim,
                              const int64_t *timestamps,
                              double similarity_threshold,
                              double window_days,
                              bool *kept_out);

/**
 * Load a dataset file (`.jsonl` or `.csv` in the determination-checkpoint
 * column set) into an opaque handle.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` a valid write
 * target. The handle must be freed with `esg_dataset_free`.
 */
enum EsgStatus esg_dataset_load(const char *path, struct EsgDataset **out);

/**
 * Number of records in a dataset handle; 0 for NULL.
 *
 * # Safety
 * `ds` must be a live handle from `esg_dataset_load` or NULL.
 */
uintptr_t esg_dataset_len(const struct EsgDataset *ds);

/**
 * Aggregate statistics (totals, per-company counts, macro ratios) as a
 * JSON document. Free the string with `esg_string_free`.
 *
 * # Safety
 * `ds` must be a live handle; `out` a valid write target.
 */
enum EsgStatus esg_dataset_stats_json(const struct EsgDataset *ds, char **out);

/**
 * Relevance-score histogram: `counts_out` receives counts for scores
 * 1..=10, `mean_out` the mean score.
 *
 * # Safety
 * `ds` must be a live handle; `counts_out` must have room for 10 values;
 * `mean_out` must be a valid write target.
 */
enum EsgStatus esg_dataset_relevance_histogram(const struct EsgDataset *ds,
                                               uint64_t *counts_out,
                                               double *mean_out);

/**
 * Free a dataset handle. NULL is a no-op.
 *
 * # Safety
 * `ds` must come from `esg_dataset_load` and not be freed twice.
 */
void esg_dataset_free(struct EsgDataset *ds);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus
