#ifndef LOCALD_H
#define LOCALD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Version of this ABI. Bumped on any incompatible change.
 */
#define LOCALD_ABI_VERSION 1

/**
 * Result of every call.
 */
typedef enum LocaldStatus {
  LOCALD_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LOCALD_STATUS_NULL_POINTER = 1,
  /**
   * A string was not UTF-8, a buffer was too small, or a parameter was out of range.
   */
  LOCALD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A graph could not be built or parsed.
   */
  LOCALD_STATUS_GRAPH = 3,
  /**
   * An ILP instance could not be built or parsed, or a local solve failed.
   */
  LOCALD_STATUS_ILP = 4,
  /**
   * An internal invariant failed; the result would be wrong.
   */
  LOCALD_STATUS_INVARIANT = 5,
  /**
   * A panic was caught.
   */
  LOCALD_STATUS_PANIC = 6,
} LocaldStatus;

/**
 * A partition of a graph's vertices into clusters and deleted vertices.
 */
typedef struct LocaldDecomposition LocaldDecomposition;

/**
 * A simple undirected graph.
 */
typedef struct LocaldGraph LocaldGraph;

/**
 * A packing or covering instance.
 */
typedef struct LocaldIlp LocaldIlp;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * ABI version; compare against `LOCALD_ABI_VERSION`.
 */
uint32_t locald_abi_version(void);

/**
 * The message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call on this thread.
 */
const char *locald_last_error(void);

/**
 * Builds a graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` values (it may be null when
 * `edge_count` is 0); `out` must be writable.
 */
enum LocaldStatus locald_graph_from_edges(uintptr_t n,
                                          const uintptr_t *edges,
                                          uintptr_t edge_count,
                                          struct LocaldGraph **out);

/**
 * Generates a graph from a family such as `cycle:200` or `gnp:500:0.006`.
 *
 * # Safety
 * `family` must be a NUL-terminated string; `out` must be writable.
 */
enum LocaldStatus locald_graph_generate(const char *family,
                                        uint64_t seed,
                                        struct LocaldGraph **out);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
uintptr_t locald_graph_vertex_count(const struct LocaldGraph *g);

/**
 * Edge count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
uintptr_t locald_graph_edge_count(const struct LocaldGraph *g);

/**
 * # Safety
 * `g` must be null or a graph handle not yet freed.
 */
void locald_graph_free(struct LocaldGraph *g);

/**
 * Exponential-clock decomposition with rate `lambda`. `n_tilde` = 0 uses
 * the vertex count; a null `profile` means `desk`.
 *
 * # Safety
 * `g` must be a live graph handle, `profile` null or a NUL-terminated
 * string, and `out` writable.
 */
enum LocaldStatus locald_exp_clock_ldd(const struct LocaldGraph *g,
                                       double lambda,
                                       uintptr_t n_tilde,
                                       uint64_t seed,
                                       const char *profile,
                                       struct LocaldDecomposition **out);

/**
 * High-probability decomposition deleting at most an `eps` fraction; with
 * `refine`, clusters are split into balls of small strong diameter.
 *
 * # Safety
 * As for [`locald_exp_clock_ldd`].
 */
enum LocaldStatus locald_whp_ldd(const struct LocaldGraph *g,
                                 double eps,
                                 bool refine,
                                 uintptr_t n_tilde,
                                 uint64_t seed,
                                 const char *profile,
                                 struct LocaldDecomposition **out);

/**
 * Number of vertices covered by the decomposition, or 0 for null.
 *
 * # Safety
 * `d` must be null or a live decomposition handle.
 */
uintptr_t locald_decomposition_vertex_count(const struct LocaldDecomposition *d);

/**
 * Number of clusters, or 0 for null.
 *
 * # Safety
 * `d` must be null or a live decomposition handle.
 */
uintptr_t locald_decomposition_cluster_count(const struct LocaldDecomposition *d);

/**
 * Number of deleted vertices, or 0 for null.
 *
 * # Safety
 * `d` must be null or a live decomposition handle.
 */
uintptr_t locald_decomposition_deleted_count(const struct LocaldDecomposition *d);

/**
 * Writes each vertex's cluster id into `labels`, with -1 for deleted
 * vertices. `len` must be at least the vertex count.
 *
 * # Safety
 * `d` must be a live decomposition handle and `labels` must have room for
 * `len` values.
 */
enum LocaldStatus locald_decomposition_labels(const struct LocaldDecomposition *d,
                                              int64_t *labels,
                                              uintptr_t len);

/**
 * # Safety
 * `d` must be null or a decomposition handle not yet freed.
 */
void locald_decomposition_free(struct LocaldDecomposition *d);

/**
 * Parses an instance from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum LocaldStatus locald_ilp_from_json(const char *json, struct LocaldIlp **out);

/**
 * Number of variables, or 0 for null.
 *
 * # Safety
 * `ilp` must be null or a live instance handle.
 */
uintptr_t locald_ilp_var_count(const struct LocaldIlp *ilp);

/**
 * True for packing instances, false for covering ones or null.
 *
 * # Safety
 * `ilp` must be null or a live instance handle.
 */
bool locald_ilp_is_packing(const struct LocaldIlp *ilp);

/**
 * # Safety
 * `ilp` must be null or an instance handle not yet freed.
 */
void locald_ilp_free(struct LocaldIlp *ilp);

/**
 * Approximate packing. Writes one 0/1 byte per variable into `values` and,
 * if `weight` is non-null, the solution weight. `n_tilde` = 0 uses
 * max(variables, total weight).
 *
 * # Safety
 * `ilp` must be a live instance handle, `values` must have room for `len`
 * bytes, `profile` null or a NUL-terminated string, `weight` null or writable.
 */
enum LocaldStatus locald_approx_pack(const struct LocaldIlp *ilp,
                                     double eps,
                                     uintptr_t n_tilde,
                                     uint64_t seed,
                                     const char *profile,
                                     uint8_t *values,
                                     uintptr_t len,
                                     uint64_t *weight);

/**
 * Approximate covering; arguments as for [`locald_approx_pack`].
 *
 * # Safety
 * As for [`locald_approx_pack`].
 */
enum LocaldStatus locald_approx_cover(const struct LocaldIlp *ilp,
                                      double eps,
                                      uintptr_t n_tilde,
                                      uint64_t seed,
                                      const char *profile,
                                      uint8_t *values,
                                      uintptr_t len,
                                      uint64_t *weight);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LOCALD_H */
