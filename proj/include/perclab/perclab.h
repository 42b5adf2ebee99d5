#ifndef PERCLAB_H
#define PERCLAB_H

/* C interface to the percolation laboratory. Every operation returns a
 * status code and, on success (and some recoverable failures, noted below),
 * a result handle owning a JSON document. Handles are opaque; free them with
 * the matching _free call. All functions are thread-safe; the last-error
 * message is per thread. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum perclab_status {
    PERCLAB_OK = 0,
    PERCLAB_EINTERNAL = 1,  /* unexpected failure, see perclab_last_error */
    PERCLAB_EINVAL = 2,     /* domain or usage error */
    PERCLAB_ERESOURCE = 3,  /* a size or memory budget was exceeded */
    PERCLAB_EPRECISION = 4  /* tolerance not reached or iteration diverged */
} perclab_status;

/* Sentinel for "no cap" on radius and size limits. */
#define PERCLAB_UNLIMITED UINT64_MAX

typedef struct perclab_graph perclab_graph;
typedef struct perclab_result perclab_result;

const char* perclab_version(void);

/* Message from the calling thread's most recent failure; never NULL. */
const char* perclab_last_error(void);

/* Worker count for the estimators; 0 restores the hardware default. */
void perclab_set_threads(uint32_t n);
uint32_t perclab_threads(void);

/* --- graph handles ------------------------------------------------------ */

/* Accepts Q<m>, T<n>^<d>, K<n>, K<n>^<d>. */
perclab_status perclab_graph_parse(const char* spec, perclab_graph** out);
void perclab_graph_free(perclab_graph* g);
uint64_t perclab_graph_vertices(const perclab_graph* g);
uint32_t perclab_graph_degree(const perclab_graph* g);
/* Closed-form anchor 1/(degree - 1). */
perclab_status perclab_anchor_pc(const perclab_graph* g, double* out);

/* --- results ------------------------------------------------------------ */

/* UTF-8 text owned by the handle; JSON unless noted. */
const char* perclab_result_text(const perclab_result* r);
void perclab_result_free(perclab_result* r);

/* --- single-configuration operations ------------------------------------ */

/* BFS cluster report from `root`; caps use PERCLAB_UNLIMITED for none. */
perclab_status perclab_explore(const perclab_graph* g, double p, uint64_t seed,
                               uint64_t root, uint64_t r_max, uint64_t size_cap,
                               int with_diameter, perclab_result** out);

/* Whole-configuration census. options_json may be NULL or hold any of
 * {"diameters": bool, "z_thresholds": [k...], "d_radii": [r...],
 *  "d_size_threshold": n, "top_representatives": n}. */
perclab_status perclab_census(const perclab_graph* g, double p, uint64_t seed,
                              const char* options_json, perclab_result** out);

/* --- Monte Carlo estimators ---------------------------------------------- */

/* observable is one of "chi", "onearm", "boundary", "tail"; arg is the
 * radius r (onearm, boundary) or the size threshold k (tail), ignored for
 * "chi". */
perclab_status perclab_estimate(const perclab_graph* g, const char* observable,
                                double p, uint64_t arg, uint64_t trials,
                                uint64_t seed, perclab_result** out);

/* Survival curve P(one-arm at radius r) for every r in [0, r_max]. */
perclab_status perclab_onearm_curve(const perclab_graph* g, double p,
                                    uint64_t r_max, uint64_t trials,
                                    uint64_t seed, perclab_result** out);

/* Expected boundary volume E|dB(r)| for every r in [0, r_max]. */
perclab_status perclab_boundary_curve(const perclab_graph* g, double p,
                                      uint64_t r_max, uint64_t trials,
                                      uint64_t seed, perclab_result** out);

/* Bisection for chi(p) = lambda V^{1/3}. trial_cap and chi_trials of 0 keep
 * the defaults. A stalled search fills *out and returns PERCLAB_EPRECISION;
 * the JSON carries "converged": false and the surviving bracket. */
perclab_status perclab_find_pc(const perclab_graph* g, double lambda,
                               double tol, uint64_t trial_cap,
                               uint64_t chi_trials, uint64_t seed,
                               perclab_result** out);

/* --- walks and mixing ----------------------------------------------------- */

/* Lazy-walk mixing time of the open cluster containing root: exact when the
 * cluster fits the dense budget, else the 8|E|diam bound (flagged). */
perclab_status perclab_tmix_lazy(const perclab_graph* g, double p,
                                 uint64_t seed, uint64_t root,
                                 perclab_result** out);

/* Non-backtracking walk mixing time at slack alpha; step_cap of 0 keeps the
 * default. Divergence fills *out with the best iterate and returns
 * PERCLAB_EPRECISION. */
perclab_status perclab_tmix_nb(const perclab_graph* g, double alpha,
                               uint64_t step_cap, perclab_result** out);

/* Triangle diagram at the root; exact enumerates (|E| <= 20), otherwise a
 * Monte Carlo two-point row is convolved. trials/seed are mc-only. */
perclab_status perclab_triangle(const perclab_graph* g, double p, int exact,
                                uint64_t trials, uint64_t seed,
                                perclab_result** out);

/* Finite analogues of the mean-field assumption scalars (a1, a2, heat) at
 * the nb mixing horizon, with p from a fresh find_pc run. pc_json may be
 * NULL or hold {"lambda", "tol", "trial_cap", "chi_trials"}. */
perclab_status perclab_assumptions(const perclab_graph* g, double alpha,
                                   const char* pc_json, uint64_t seed,
                                   perclab_result** out);

/* --- exact oracle --------------------------------------------------------- */

/* Full enumeration over 2^|E| configurations (|E| <= 20). as_fixtures != 0
 * renders the line-oriented `key = value` fixture text instead of JSON. */
perclab_status perclab_oracle(const perclab_graph* g, double p, uint64_t root,
                              uint64_t r_max, int as_fixtures,
                              perclab_result** out);

/* --- experiments ---------------------------------------------------------- */

/* plan_json: {"p_source": "anchor"|"explicit"|"find_pc", "cells":
 * [{"spec": "...", "epsilon": e, "p": p}...], "seeds_per_cell", "master_seed",
 * "diameters", "mixing", "top_clusters", "ranks", "onearm_rmax",
 * "onearm_trials", "epsilon_max", "regime_floor", "pc": {...}}. format is
 * "json" (plan echoed back with the rows) or "csv". */
perclab_status perclab_sweep(const char* plan_json, const char* format,
                             perclab_result** out);

/* sweep_json: a document produced by perclab_sweep with format "json".
 * law is one of "c1_volume", "delta_max", "tmix", "onearm_profile";
 * min_hits of 0 keeps the default censoring threshold. */
perclab_status perclab_fit(const char* sweep_json, const char* law,
                           uint64_t min_hits, const char* format,
                           perclab_result** out);

#ifdef __cplusplus
}
#endif

#endif /* PERCLAB_H */
