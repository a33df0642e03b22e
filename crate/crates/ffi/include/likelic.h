#ifndef LIKELIC_H
#define LIKELIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum LikelicStatus {
  LIKELIC_STATUS_OK = 0,
  LIKELIC_STATUS_NULL_POINTER = 1,
  LIKELIC_STATUS_INVALID_UTF8 = 2,
  LIKELIC_STATUS_PARSE_ERROR = 3,
  LIKELIC_STATUS_UNKNOWN_VERTEX = 4,
  LIKELIC_STATUS_INVALID_ARGUMENT = 5,
  LIKELIC_STATUS_NOT_FOUND = 6,
} LikelicStatus;

/**
 * Propagation semantics, mirroring the library's modes.
 */
typedef enum LikelicMode {
  LIKELIC_MODE_FIXPOINT = 0,
  LIKELIC_MODE_WAVEFRONT = 1,
} LikelicMode;

/**
 * Opaque context graph.
 */
typedef struct LikelicGraph LikelicGraph;

/**
 * Opaque valuation keyed by vertex label.
 */
typedef struct LikelicValuation LikelicValuation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or NULL. The pointer stays valid until
 * the next failing call on the same thread; do not free it.
 */
const char *likelic_last_error(void);

/**
 * Canonical name of a grade ("impossible" … "necessary"), or NULL when the
 * grade is outside 0..=6. Static storage; do not free.
 */
const char *likelic_grade_name(uint8_t grade);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void likelic_string_free(char *s);

/**
 * Parses context text into a new graph handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LikelicStatus likelic_graph_parse(const char *text, struct LikelicGraph **out);

/**
 * # Safety
 * `g` must be NULL or a handle from [`likelic_graph_parse`] not yet freed.
 */
void likelic_graph_free(struct LikelicGraph *g);

/**
 * Number of vertices, 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live graph handle.
 */
size_t likelic_graph_vertex_count(const struct LikelicGraph *g);

/**
 * Canonical text form of the graph; free with [`likelic_string_free`].
 *
 * # Safety
 * `g` must be a live graph handle.
 */
char *likelic_graph_serialize(const struct LikelicGraph *g);

/**
 * Derived likeliness of `from → to` written to `*out_grade`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum LikelicStatus likelic_derived_implication(const struct LikelicGraph *g,
                                               const char *from,
                                               const char *to,
                                               uint8_t *out_grade);

/**
 * Witness chain for `from → to` as a new string in `*out`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum LikelicStatus likelic_explain(const struct LikelicGraph *g,
                                   const char *from,
                                   const char *to,
                                   char **out);

/**
 * Propagates `source` at `grade` and stores a new valuation in `*out`.
 *
 * # Safety
 * Pointers must be valid; `source` NUL-terminated.
 */
enum LikelicStatus likelic_propagate(const struct LikelicGraph *g,
                                     const char *source,
                                     uint8_t grade,
                                     enum LikelicMode mode,
                                     struct LikelicValuation **out);

/**
 * Grade of `label` in the valuation. Returns `NotFound` when the vertex is
 * unassigned.
 *
 * # Safety
 * Pointers must be valid; `label` NUL-terminated.
 */
enum LikelicStatus likelic_valuation_get(const struct LikelicValuation *v,
                                         const char *label,
                                         uint8_t *out_grade);

/**
 * Number of assigned vertices, 0 for NULL.
 *
 * # Safety
 * `v` must be NULL or a live valuation handle.
 */
size_t likelic_valuation_len(const struct LikelicValuation *v);

/**
 * # Safety
 * `v` must be NULL or a handle from [`likelic_propagate`] not yet freed.
 */
void likelic_valuation_free(struct LikelicValuation *v);

/**
 * Writes the six cut probabilities for `base` into `out_cuts[0..6]`.
 *
 * # Safety
 * `out_cuts` must point to at least six writable doubles.
 */
enum LikelicStatus likelic_boundaries(double base, double *out_cuts);

/**
 * Grade of probability `p` under base threshold `base`.
 *
 * # Safety
 * `out_grade` must be a valid pointer.
 */
enum LikelicStatus likelic_grade_from_probability(double p, double base, uint8_t *out_grade);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIKELIC_H */
