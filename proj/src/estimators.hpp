#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"
#include "percolation.hpp"

namespace perclab {

// Monte Carlo estimate with its sampling error. Trials are independent; the
// master seed reproduces the run exactly at any thread count.
struct EstimatorResult {
    std::string observable;
    double p = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    uint64_t trials = 0;
    uint64_t seed = 0;
};

// Mean open-cluster size of a uniform root (the susceptibility chi(p)).
EstimatorResult estimate_susceptibility(const GraphSpec& spec, double p, uint64_t trials,
                                        uint64_t seed);

// Probability that a uniform root reaches intrinsic distance >= r within its
// open cluster. r = 0 is identically 1. Edges in `avoid` are treated closed.
EstimatorResult estimate_onearm(const GraphSpec& spec, double p, uint64_t r, uint64_t trials,
                                uint64_t seed, const AvoidSet* avoid = nullptr);

// Mean size of the intrinsic sphere |∂B_root(r)| around a uniform root.
EstimatorResult estimate_boundary_volume(const GraphSpec& spec, double p, uint64_t r,
                                         uint64_t trials, uint64_t seed);

// Probability that the open cluster of a uniform root holds >= k vertices.
// Exploration stops at k vertices, so cost is bounded by k per trial.
EstimatorResult estimate_cluster_tail(const GraphSpec& spec, double p, uint64_t k, uint64_t trials,
                                      uint64_t seed);

// One-arm probabilities for every radius 0..r_max from a single exploration
// per trial. hits[r] counts trials whose cluster reached distance >= r, so
// hits[0] == trials and hits is non-increasing.
struct OnearmCurve {
    GraphSpec spec;
    double p = 0.0;
    uint64_t r_max = 0;
    uint64_t trials = 0;
    uint64_t seed = 0;
    std::vector<uint64_t> hits;
};

OnearmCurve estimate_onearm_curve(const GraphSpec& spec, double p, uint64_t r_max, uint64_t trials,
                                  uint64_t seed);

// Expected boundary volume E|dB(r)| for every radius 0..r_max, one
// exploration per trial. Sharing a seed with estimate_onearm_curve measures
// both curves on the same sample set.
struct BoundaryCurve {
    GraphSpec spec;
    double p = 0.0;
    uint64_t r_max = 0;
    uint64_t trials = 0;
    uint64_t seed = 0;
    std::vector<double> mean;
    std::vector<double> std_error;
};

BoundaryCurve estimate_boundary_curve(const GraphSpec& spec, double p, uint64_t r_max,
                                      uint64_t trials, uint64_t seed);

// Mean-field anchor for the critical point, 1/(degree - 1). Domain error on
// degree < 2 (chi never crosses a nontrivial threshold on such graphs).
double anchor_pc(const GraphSpec& spec);

struct PcOptions {
    double lambda = 1.0;       // target susceptibility is lambda * V^{1/3}
    double tol = 1e-4;         // stop once the bracket is this narrow
    uint64_t trial_cap = 1ull << 20;  // per-probe budget before giving up
    uint64_t chi_trials = 1ull << 14; // susceptibility sample at the answer
};

struct PcEstimate {
    double p_hat = 0.0;        // midpoint of the final bracket
    double lambda = 0.0;
    double target = 0.0;       // lambda * V^{1/3}
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    EstimatorResult chi_at_p_hat;  // fresh susceptibility sample at p_hat
    bool converged = false;        // always true on a returned estimate
    uint32_t probes = 0;
    uint64_t trials_used = 0;
    uint64_t seed = 0;
};

// Bisects [0, 1] for the p where chi(p) crosses lambda * V^{1/3}. Every probe
// reuses the same per-trial seeds, so probe estimates are monotonically
// coupled in p and the bracket stays valid. A probe samples in batches until
// the running mean is two standard errors away from the target; a probe that
// exhausts trial_cap undecided is ambiguous at the Monte Carlo resolution,
// and the search throws a precision error carrying the final bracket.
PcEstimate find_pc(const GraphSpec& spec, const PcOptions& opts, uint64_t seed);

}  // namespace perclab
