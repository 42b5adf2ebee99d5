#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "percolation.hpp"

namespace perclab {

struct CensusOptions {
    bool diameters = false;
    std::vector<uint64_t> z_thresholds;   // thresholds k for Z_{>=k}
    std::vector<uint64_t> d_radii;        // radii r for the D_r-style count
    uint64_t d_size_threshold = kUnlimited;  // cluster-size filter for D_r
    uint32_t top_representatives = 0;     // roots of the largest clusters to report
    uint64_t memory_budget_vertices = 1ull << 26;
};

struct CensusSummary {
    std::vector<uint64_t> sizes;  // all cluster sizes, non-increasing
    uint64_t cluster_count = 0;
    int64_t delta_max = -1;       // max diameter over clusters; -1 if not computed
    std::vector<std::pair<uint64_t, uint64_t>> z_geq;  // (k, vertices in clusters of size >= k)
    std::vector<std::pair<uint64_t, uint64_t>> d_r;    // (r, count)
    uint64_t max_edge_count = 0;  // most open edges in any one cluster
    // Root vertex of each of the top_representatives largest clusters,
    // ordered by (size desc, root asc).
    std::vector<uint64_t> top_roots;
};

// Whole-configuration sweep: union-find over every edge in canonical order,
// one edge_open query per edge. Resource error when V exceeds the budget
// (use the sampled estimators instead at that scale).
CensusSummary census(const PercolationSample& sample, const CensusOptions& opts = {});

// sizes[j-1], or 0 when fewer than j clusters exist.
uint64_t jth_largest(const CensusSummary& summary, uint64_t j);

}  // namespace perclab
