#ifndef GSH_H
#define GSH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. `GSH_STATUS_OK` is zero; everything else is a failure.
 */
typedef enum GshStatus {
  GSH_STATUS_OK = 0,
  GSH_STATUS_NULL_POINTER = 1,
  GSH_STATUS_INVALID_ARGUMENT = 2,
  GSH_STATUS_PARSE = 3,
  GSH_STATUS_IO = 4,
  GSH_STATUS_EMPTY_GRAPH = 5,
  GSH_STATUS_UNSUPPORTED = 6,
  GSH_STATUS_UNDEFINED = 7,
  GSH_STATUS_PANIC = 8,
} GshStatus;

typedef enum GshStatistic {
  GSH_STATISTIC_EDGES = 0,
  GSH_STATISTIC_TRIANGLES = 1,
  GSH_STATISTIC_WEDGES = 2,
  GSH_STATISTIC_CLUSTERING = 3,
  GSH_STATISTIC_NODES = 4,
} GshStatistic;

/**
 * A held sample; estimates are computed on first use and cached.
 */
typedef struct GshSample GshSample;

/**
 * An edge stream in arrival order.
 */
typedef struct GshStream GshStream;

/**
 * `alpha` is meaningful only when `has_alpha` is set.
 */
typedef struct GshExact {
  uint64_t n;
  uint64_t n_k;
  uint64_t n_t;
  uint64_t n_lambda;
  double alpha;
  bool has_alpha;
  double density;
} GshExact;

typedef struct GshSamplerConfig {
  double p;
  double q;
  /**
   * When set, edges that close a held triangle are kept with probability 1.
   */
  bool triangle_closure;
  uint64_t seed;
} GshSamplerConfig;

/**
 * One held edge. `class_bits` is 0 for p, 1 for q, 2 for probability one.
 */
typedef struct GshSampledEdge {
  uint64_t a;
  uint64_t b;
  uint8_t class_bits;
  /**
   * Zero-based stream position.
   */
  size_t arrival;
  double probability;
} GshSampledEdge;

/**
 * `variance`, `lb` and `ub` are meaningful only when `has_variance` is set.
 */
typedef struct GshEstimate {
  double estimate;
  double variance;
  double lb;
  double ub;
  bool has_variance;
  /**
   * The clustering variance approximation was negative and clamped to 0.
   */
  bool variance_clamped;
} GshEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. The pointer stays valid until the next call into this
 * library from the same thread.
 */
const char *gsh_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gsh_version(void);

/**
 * Reads an edge list file: two integer node ids per line, `#` and `%`
 * comment lines, extra columns ignored, self-loops and duplicates dropped.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum GshStatus gsh_stream_from_file(const char *path, bool directed, struct GshStream **out);

/**
 * Builds a stream from `n_edges` pairs laid out as
 * `[a0, b0, a1, b1, ...]`. Self-loops are rejected; duplicates are dropped.
 *
 * # Safety
 * `pairs` must point to `2 * n_edges` readable values; `out` must be
 * writable.
 */
enum GshStatus gsh_stream_from_edges(const uint64_t *pairs,
                                     size_t n_edges,
                                     bool directed,
                                     struct GshStream **out);

/**
 * Number of edges; 0 for a null handle.
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
size_t gsh_stream_len(const struct GshStream *stream);

/**
 * A new stream holding a seeded uniform permutation of `stream`.
 *
 * # Safety
 * `stream` must be a live handle; `out` must be writable.
 */
enum GshStatus gsh_stream_permute(const struct GshStream *stream,
                                  uint64_t seed,
                                  struct GshStream **out);

/**
 * Exact counts of the full stream.
 *
 * # Safety
 * `stream` must be a live handle; `out` must be writable.
 */
enum GshStatus gsh_stream_exact(const struct GshStream *stream, struct GshExact *out);

/**
 * # Safety
 * `stream` must be null or a handle not yet freed.
 */
void gsh_stream_free(struct GshStream *stream);

/**
 * One pass of the sampler over `stream` in its current order.
 *
 * # Safety
 * `stream` must be a live handle, `config` readable and `out` writable.
 */
enum GshStatus gsh_sample_run(const struct GshStream *stream,
                              const struct GshSamplerConfig *config,
                              struct GshSample **out);

/**
 * Number of held edges; 0 for a null handle.
 *
 * # Safety
 * `sample` must be null or a live handle.
 */
size_t gsh_sample_len(const struct GshSample *sample);

/**
 * The `index`-th held edge in arrival order.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be writable.
 */
enum GshStatus gsh_sample_edge(const struct GshSample *sample,
                               size_t index,
                               struct GshSampledEdge *out);

/**
 * Estimate, variance estimate and 95% bounds of one statistic. Returns
 * `GSH_STATUS_UNDEFINED` for clustering when no wedge was sampled and
 * `GSH_STATUS_UNSUPPORTED` for triangle statistics of a directed sample.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be writable.
 */
enum GshStatus gsh_sample_estimate(const struct GshSample *sample,
                                   enum GshStatistic statistic,
                                   struct GshEstimate *out);

/**
 * # Safety
 * `sample` must be null or a handle not yet freed.
 */
void gsh_sample_free(struct GshSample *sample);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GSH_H */
