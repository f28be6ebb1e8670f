#ifndef INCR_PAGERANK_H
#define INCR_PAGERANK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum IprStatus {
  IPR_STATUS_OK = 0,
  IPR_STATUS_NULL_POINTER = 1,
  IPR_STATUS_INVALID_ARGUMENT = 2,
  IPR_STATUS_NODE_OUT_OF_RANGE = 3,
  IPR_STATUS_DUPLICATE_EDGE = 4,
  IPR_STATUS_SELF_LOOP = 5,
  IPR_STATUS_EDGE_NOT_IN_GRAPH = 6,
  IPR_STATUS_BUFFER_TOO_SMALL = 7,
  IPR_STATUS_PANIC = 8,
} IprStatus;

/**
 * Opaque directed graph.
 */
typedef struct IprGraph IprGraph;

/**
 * Opaque arrival script.
 */
typedef struct IprScript IprScript;

/**
 * Opaque walk store together with its random stream.
 */
typedef struct IprWalkStore IprWalkStore;

typedef struct IprUpdateStats {
  uint64_t reroute_events;
  uint64_t steps_regenerated;
  uint64_t coin_flips;
} IprUpdateStats;

/**
 * Scalar counters of one replay.
 */
typedef struct IprRunSummary {
  uint64_t node_count;
  uint64_t edge_count;
  uint64_t reroutes_total;
  uint64_t reroutes_toprow;
  uint64_t top_edge_reroutes;
  uint64_t steps_regenerated;
  uint64_t coin_flips;
  double wall_ms;
} IprRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of `status`.
 */
const char *ipr_status_message(enum IprStatus status);

/**
 * Creates a graph with `node_count` isolated nodes.
 */
enum IprStatus ipr_graph_new(uintptr_t node_count, struct IprGraph **out);

void ipr_graph_free(struct IprGraph *graph);

enum IprStatus ipr_graph_node_count(const struct IprGraph *graph, uintptr_t *out);

enum IprStatus ipr_graph_edge_count(const struct IprGraph *graph, uintptr_t *out);

/**
 * Inserts `(u, v)`; `out_degree` (may be null) receives the new outdegree of `u`.
 */
enum IprStatus ipr_graph_add_edge(struct IprGraph *graph,
                                  uint32_t u,
                                  uint32_t v,
                                  uintptr_t *out_degree);

enum IprStatus ipr_graph_outdegree(const struct IprGraph *graph, uint32_t u, uintptr_t *out);

/**
 * The `k`-th out-neighbor of `u` in arrival order.
 */
enum IprStatus ipr_graph_out_neighbor(const struct IprGraph *graph,
                                      uint32_t u,
                                      uintptr_t k,
                                      uint32_t *out);

/**
 * Builds `walks_per_node` walks from every node of `graph`. The store owns
 * a random stream seeded with `seed` and uses it for all later updates.
 */
enum IprStatus ipr_store_new(const struct IprGraph *graph,
                             uintptr_t walks_per_node,
                             double epsilon,
                             uint64_t seed,
                             struct IprWalkStore **out);

void ipr_store_free(struct IprWalkStore *store);

/**
 * Walk maintenance after `(u, v)` was added to `graph`. `out_delta` (may
 * be null) receives the work done by this arrival.
 */
enum IprStatus ipr_store_on_edge_arrival(struct IprWalkStore *store,
                                         const struct IprGraph *graph,
                                         uint32_t u,
                                         uint32_t v,
                                         struct IprUpdateStats *out_delta);

/**
 * Totals over every arrival processed by this store.
 */
enum IprStatus ipr_store_stats(const struct IprWalkStore *store, struct IprUpdateStats *out);

/**
 * Writes the visit-frequency estimate into `scores[0..node_count]`.
 */
enum IprStatus ipr_store_estimate(const struct IprWalkStore *store, double *scores, uintptr_t len);

/**
 * Per-node occurrence counts over all walk positions.
 */
enum IprStatus ipr_store_visit_counts(const struct IprWalkStore *store,
                                      uint64_t *counts,
                                      uintptr_t len);

/**
 * Binary family of top-row width `n_top` (a power of two, at least 2).
 */
enum IprStatus ipr_script_build_binary(uintptr_t n_top, struct IprScript **out);

/**
 * `d`-ary family of top-row width `n_top`.
 */
enum IprStatus ipr_script_build_dary(uintptr_t n_top, uintptr_t d, struct IprScript **out);

/**
 * A uniformly permuted copy of `script`.
 */
enum IprStatus ipr_script_random_order(const struct IprScript *script,
                                       uint64_t seed,
                                       struct IprScript **out);

void ipr_script_free(struct IprScript *script);

enum IprStatus ipr_script_node_count(const struct IprScript *script, uintptr_t *out);

enum IprStatus ipr_script_edge_count(const struct IprScript *script, uintptr_t *out);

/**
 * Edge `index` in arrival order and its row label (−1 for top-row edges).
 */
enum IprStatus ipr_script_edge(const struct IprScript *script,
                               uintptr_t index,
                               uint32_t *out_u,
                               uint32_t *out_v,
                               int32_t *out_row);

/**
 * Replays `script` from an empty graph and reports the counters.
 */
enum IprStatus ipr_replay(const struct IprScript *script,
                          uintptr_t walks_per_node,
                          double epsilon,
                          uint64_t seed,
                          struct IprRunSummary *out);

double ipr_harmonic(uintptr_t d);

double ipr_predicted_row_updates(uintptr_t walks_per_node,
                                 uintptr_t n_top,
                                 double epsilon,
                                 uintptr_t d,
                                 uint32_t row);

double ipr_predicted_total(uintptr_t walks_per_node, uintptr_t n_top, double epsilon, uintptr_t d);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INCR_PAGERANK_H */
