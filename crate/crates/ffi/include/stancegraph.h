/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef STANCEGRAPH_H
#define STANCEGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SG_STATUS_OK = 0,
  SG_STATUS_NULL_ARGUMENT = 1,
  SG_STATUS_INVALID_ARGUMENT = 2,
  SG_STATUS_IO = 3,
  SG_STATUS_PARSE = 4,
  SG_STATUS_VALIDATION = 5,
  SG_STATUS_UNDEFINED = 6,
  SG_STATUS_REMOTE = 7,
  SG_STATUS_PANIC = 8,
} SgStatus;

/**
 * Result of fitting MACE to an [`SgAnnotations`].
 */
typedef struct SgAggregation SgAggregation;

/**
 * Crowd annotations of one dataset.
 */
typedef struct SgAnnotations SgAnnotations;

/**
 * A labeled or unlabeled tuple store.
 */
typedef struct SgStore SgStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library from this thread.
 */
const char *sg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sg_version(void);

/**
 * Name of label `index` (0 = "CT+" ... 5 = "NE"), or NULL if out of range.
 */
const char *sg_label_name(uint32_t index);

/**
 * Reads a tuple store (JSONL).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
SgStatus sg_store_read(const char *path, SgStore **out_store);

/**
 * # Safety
 * `store` must come from `sg_store_read` and not be freed twice. NULL is ignored.
 */
void sg_store_free(SgStore *store);

/**
 * Number of sentences and tuples in a store.
 *
 * # Safety
 * `store` must be a live handle; the out-pointers must be valid.
 */
SgStatus sg_store_counts(const SgStore *store, size_t *out_sentences, size_t *out_tuples);

/**
 * Share of PR+/PS+ among non-NE stances, of the author only or of all sources.
 *
 * # Safety
 * `store` must be a live handle; the out-pointers must be valid.
 */
SgStatus sg_hedging_uncertainty(const SgStore *store,
                                bool author_only,
                                size_t *out_hedged,
                                size_t *out_epistemic,
                                double *out_ratio);

/**
 * Reads an annotation CSV (`#labels=` line, then item_id,annotator_id,label).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
SgStatus sg_annotations_read(const char *path, SgAnnotations **out_annotations);

/**
 * # Safety
 * `annotations` must come from `sg_annotations_read`. NULL is ignored.
 */
void sg_annotations_free(SgAnnotations *annotations);

/**
 * Number of items, annotators and labels.
 *
 * # Safety
 * `annotations` must be a live handle; the out-pointers must be valid.
 */
SgStatus sg_annotations_counts(const SgAnnotations *annotations,
                               size_t *out_items,
                               size_t *out_annotators,
                               size_t *out_labels);

/**
 * # Safety
 * `annotations` must be a live handle and `out_value` valid.
 */
SgStatus sg_raw_agreement(const SgAnnotations *annotations, double *out_value);

/**
 * Krippendorff's alpha with the nominal metric.
 *
 * # Safety
 * `annotations` must be a live handle and `out_value` valid.
 */
SgStatus sg_krippendorff_alpha(const SgAnnotations *annotations, double *out_value);

/**
 * Fits MACE. A negative `smoothing` selects the default of 0.1 / K.
 *
 * # Safety
 * `annotations` must be a live handle and `out_aggregation` valid.
 */
SgStatus sg_mace_fit(const SgAnnotations *annotations,
                     uint32_t iters,
                     uint32_t restarts,
                     double smoothing,
                     uint64_t seed,
                     SgAggregation **out_aggregation);

/**
 * # Safety
 * `aggregation` must come from `sg_mace_fit`. NULL is ignored.
 */
void sg_aggregation_free(SgAggregation *aggregation);

/**
 * Number of aggregated items; items are numbered by first appearance in
 * the annotation file.
 *
 * # Safety
 * `aggregation` must be a live handle and `out_items` valid.
 */
SgStatus sg_aggregation_item_count(const SgAggregation *aggregation, size_t *out_items);

/**
 * Most probable label of `item` and the posterior entropy in nats.
 *
 * # Safety
 * `aggregation` must be a live handle; the out-pointers must be valid.
 */
SgStatus sg_aggregation_item(const SgAggregation *aggregation,
                             size_t item,
                             size_t *out_label,
                             double *out_entropy);

/**
 * Posterior probability of `label` for `item`.
 *
 * # Safety
 * `aggregation` must be a live handle and `out_value` valid.
 */
SgStatus sg_aggregation_posterior(const SgAggregation *aggregation,
                                  size_t item,
                                  size_t label,
                                  double *out_value);

/**
 * Final marginal log-likelihood of the selected restart.
 *
 * # Safety
 * `aggregation` must be a live handle and `out_value` valid.
 */
SgStatus sg_aggregation_log_likelihood(const SgAggregation *aggregation, double *out_value);

/**
 * Macro F1 over six-way label indices, over all present classes and
 * without NE. Scores are fractions in [0, 1].
 *
 * # Safety
 * `gold` and `pred` must point to `n` readable bytes each.
 */
SgStatus sg_macro_f1(const uint8_t *gold,
                     const uint8_t *pred,
                     size_t n,
                     double *out_all,
                     double *out_non_ne);

/**
 * (P(CT+) − P(CT−)) / (1 − P(NE)) of a six-way distribution.
 *
 * # Safety
 * `probs` must point to 6 readable doubles.
 */
SgStatus sg_expected_stance(const double *probs, double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STANCEGRAPH_H */
