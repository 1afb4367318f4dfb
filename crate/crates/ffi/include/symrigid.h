#ifndef SYMRIGID_H
#define SYMRIGID_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SymrigidCountFamily {
  /**
   * The `Z_k^j` count; uses `j`.
   */
  SYMRIGID_COUNT_FAMILY_ZKJ = 0,
  /**
   * `(2, m, 3, l)`; uses `m` and `l`.
   */
  SYMRIGID_COUNT_FAMILY_GAIN = 1,
  /**
   * `(2, m, l)`; uses `m` and `l`.
   */
  SYMRIGID_COUNT_FAMILY_PLAIN = 2,
} SymrigidCountFamily;

typedef enum SymrigidStatus {
  SYMRIGID_STATUS_OK = 0,
  SYMRIGID_STATUS_NULL_POINTER = 1,
  SYMRIGID_STATUS_INVALID_UTF8 = 2,
  SYMRIGID_STATUS_PARSE = 3,
  SYMRIGID_STATUS_INPUT = 4,
  SYMRIGID_STATUS_CAPACITY = 5,
  SYMRIGID_STATUS_INTERNAL = 6,
  SYMRIGID_STATUS_PANIC = 7,
} SymrigidStatus;

/**
 * Opaque gain graph.
 */
typedef struct SymrigidGraph SymrigidGraph;

typedef struct SymrigidCountSpec {
  enum SymrigidCountFamily family;
  uint32_t j;
  uint32_t m;
  uint32_t l;
} SymrigidCountSpec;

typedef struct SymrigidVerdict {
  bool sparse;
  bool tight;
  /**
   * Edges in the violating subset; 0 when sparse.
   */
  size_t witness_len;
} SymrigidVerdict;

typedef struct SymrigidOrbitRank {
  uint32_t j;
  size_t rank;
  size_t dim;
  size_t nullity;
  size_t trivial;
  size_t rows;
  bool isostatic;
} SymrigidOrbitRank;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *symrigid_last_error(void);

/**
 * Parses the text format into a new graph stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SymrigidStatus symrigid_graph_parse(const char *text, struct SymrigidGraph **out);

/**
 * Builds a named example graph for order `k`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SymrigidStatus symrigid_graph_gallery(const char *name,
                                           uint32_t k,
                                           struct SymrigidGraph **out);

/**
 * Releases a graph; NULL is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void symrigid_graph_free(struct SymrigidGraph *g);

/**
 * Group order, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live graph.
 */
uint32_t symrigid_graph_order(const struct SymrigidGraph *g);

/**
 * # Safety
 * `g` must be NULL or a live graph.
 */
size_t symrigid_graph_vertex_count(const struct SymrigidGraph *g);

/**
 * # Safety
 * `g` must be NULL or a live graph.
 */
size_t symrigid_graph_edge_count(const struct SymrigidGraph *g);

/**
 * Writes the text format of `g` into `*out`.
 *
 * # Safety
 * `g` must be a live graph and `out` a valid pointer.
 */
enum SymrigidStatus symrigid_graph_serialize(const struct SymrigidGraph *g, char **out);

/**
 * Evaluates a count; `cap` bounds the edge count for exhaustive checks (0 for the default).
 *
 * # Safety
 * `g` must be a live graph; `spec` and `out` valid pointers.
 */
enum SymrigidStatus symrigid_check(const struct SymrigidGraph *g,
                                   const struct SymrigidCountSpec *spec,
                                   size_t cap,
                                   struct SymrigidVerdict *out);

/**
 * Generic rank of the `rho_j` block: the maximum over `trials` sampled realisations.
 *
 * # Safety
 * `g` must be a live graph and `out` a valid pointer.
 */
enum SymrigidStatus symrigid_orbit_rank(const struct SymrigidGraph *g,
                                        uint32_t j,
                                        uint64_t trials,
                                        uint64_t seed,
                                        struct SymrigidOrbitRank *out);

/**
 * Full per-block report as text; `*agree` tells whether every block agrees.
 *
 * # Safety
 * `g` must be a live graph; `out` and `agree` valid pointers.
 */
enum SymrigidStatus symrigid_analyze_text(const struct SymrigidGraph *g,
                                          uint64_t trials,
                                          uint64_t seed,
                                          size_t cap,
                                          char **out,
                                          bool *agree);

/**
 * Reduction certificate as text; `*special` is set when it stops at the special case.
 *
 * # Safety
 * `g` must be a live graph; `out` and `special` valid pointers.
 */
enum SymrigidStatus symrigid_reduce_text(const struct SymrigidGraph *g,
                                         uint32_t j,
                                         size_t cap,
                                         char **out,
                                         bool *special);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void symrigid_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMRIGID_H */
