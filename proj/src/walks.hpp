#pragma once

#include <cstdint>
#include <vector>

#include "estimators.hpp"
#include "graph.hpp"
#include "percolation.hpp"

namespace perclab {

// A connected open cluster relabeled to dense local indices, CSR adjacency
// over its open edges. π(x) = degree(x) / (2 edge_count) is the stationary
// law of the walk operations below.
struct ClusterGraph {
    std::vector<uint64_t> vertices;  // original labels per local index
    std::vector<uint32_t> offsets;   // size() + 1 entries
    std::vector<uint32_t> adj;       // local indices
    uint64_t edge_count = 0;

    size_t size() const { return vertices.size(); }
    uint32_t degree(uint32_t i) const { return offsets[i + 1] - offsets[i]; }
};

// Builds the cluster graph induced by `vertices` under the sample's open
// edges. Domain error when the set has duplicates or is not connected.
ClusterGraph extract_cluster_graph(const PercolationSample& sample,
                                   const std::vector<uint64_t>& vertices);

int64_t cluster_graph_diameter(const ClusterGraph& g);

// Smallest t where the lazy walk (hold 1/2) started anywhere is within total
// variation 1/4 of π, by iterating the dense transition operator from every
// start simultaneously. Resource error above the dense budget (4000 vertices)
// directs callers to lazy_tmix_bound. tv_trace, when given, receives the
// worst-start TV distance at t = 0, 1, ... (non-increasing).
uint64_t lazy_tmix_exact(const ClusterGraph& g, std::vector<double>* tv_trace = nullptr);

// The a-priori bound 8 * edge_count * diameter.
uint64_t lazy_tmix_bound(const ClusterGraph& g);

// Non-backtracking kernel P^t(0, y): uniform measure over walks that never
// revisit the vertex of two steps ago (m choices at step one, degree-1
// afterwards).
struct NBKernel {
    GraphSpec spec;
    uint64_t t = 0;
    bool by_class = false;     // hypercube: prob indexed by Hamming weight
    std::vector<double> prob;  // by_class: value at ONE vertex of each weight; else per vertex

    double at_vertex(uint64_t y) const;
    double max_entry() const;
    double mass() const;  // total probability, 1 at every t >= 1
};

// Hypercube symmetry classes (Hamming weight, last-flipped-bit status). The
// O(m) state space replaces the 2^m * m directed edges exactly.
struct HypercubeClassState {
    uint32_t m = 0;
    uint64_t t = 0;
    std::vector<double> set_mass;    // [w]: class mass, last flipped bit still set
    std::vector<double> unset_mass;  // [w]: class mass, last flipped bit now unset

    double total_mass() const;
    double vertex_prob(uint32_t w) const;  // P^t(0, y) for any |y| = w
};

HypercubeClassState nb_hypercube_classes(uint32_t m, uint64_t t);
HypercubeClassState nb_hypercube_advance(const HypercubeClassState& state);

// P^t(0, .) for any spec: class dynamic program on hypercubes, dense
// directed-edge iteration elsewhere (resource error above the edge budget;
// domain error for t >= 2 on degree < 2).
NBKernel nb_kernel(const GraphSpec& spec, uint64_t t);

// min { t >= 1 : max_y (P^t(0,y) + P^{t+1}(0,y)) / 2 <= (1 + alpha) / V }.
// The two-step average absorbs bipartite parity; vertex-transitivity covers
// the max over starts. Divergence error past step_cap reports the best t.
uint64_t nb_tmix(const GraphSpec& spec, double alpha, uint64_t step_cap = 1ull << 18);

enum class TriangleMode { Exact, Mc };

// Triple connection sum T(y) = sum_{u,v} tau(root,u) tau(u,v) tau(v,y).
struct TriangleValue {
    GraphSpec spec;
    double p = 0.0;
    TriangleMode mode = TriangleMode::Exact;
    double diagonal = 0.0;  // T(root)
    double offdiag = 0.0;   // max over y != root
    uint64_t trials = 0;    // 0 in exact mode
    uint64_t seed = 0;
};

// Exact mode enumerates the two-point matrix (|E| <= 20); mc mode estimates
// the root row over `trials` configurations and convolves it, valid on
// transitive specs up to the dense budget. Shared trial seeds make mc values
// monotone in p.
TriangleValue triangle_sum(const GraphSpec& spec, double p, TriangleMode mode, uint64_t trials,
                           uint64_t seed);

// Diagnostic scalars for the subcritical assumptions, all computed from
// non-backtracking kernels up to t = tmix:
//   a1   |(p_hat (degree-1))^tmix - 1|
//   a2   max_y sum over t1,t2,t3 in [0,tmix] with t1+t2+t3 >= 3 of
//        (P^t1 * P^t2 * P^t3)(y), group convolution from the root
//   heat sum_v sum_{t in [2,tmix]} sum_{s in [1,t]} s P^s(0,v) P^t(0,v)
struct AssumptionReport {
    GraphSpec spec;
    double alpha = 0.0;
    uint64_t tmix = 0;
    double p_hat = 0.0;  // susceptibility-threshold estimate used in a1
    bool pc_converged = false;
    double a1 = 0.0;
    double a2 = 0.0;
    double heat = 0.0;
    uint64_t seed = 0;
};

// Fixed-horizon core, pure in its inputs (tmix >= 1).
AssumptionReport assumption_sums_at(const GraphSpec& spec, uint64_t tmix, double p_hat);

// Full pipeline: tmix from nb_tmix(spec, alpha), p_hat from find_pc.
AssumptionReport assumption_sums(const GraphSpec& spec, double alpha, const PcOptions& pc_opts,
                                 uint64_t seed);

}  // namespace perclab
