#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace perclab {

// A percolation configuration as a pure function: edge e is open iff the
// keyed-hash uniform of (seed, e) is below p. Zero memory, orientation
// independent, and monotonically coupled across p for a fixed seed.
struct PercolationSample {
    GraphSpec spec;
    double p = 0.0;
    uint64_t seed = 0;

    double edge_uniform(const EdgeId& e) const {
        return rng::uniform(seed, rng::kEdgeStream, e.key(spec));
    }
    bool open_key(uint64_t edge_key) const {
        return rng::uniform(seed, rng::kEdgeStream, edge_key) < p;
    }
    bool edge_open_id(const EdgeId& e) const { return edge_uniform(e) < p; }
    // Canonicalizes (u, v); domain error when not adjacent.
    bool edge_open(uint64_t u, uint64_t v) const {
        return edge_open_id(canonical_edge(spec, u, v));
    }
};

// Edges treated as closed regardless of the sample. A vertex-set restriction
// is expressed by listing every incident edge.
class AvoidSet {
public:
    AvoidSet() = default;

    static AvoidSet from_edges(const GraphSpec& spec,
                               const std::vector<std::pair<uint64_t, uint64_t>>& edges);
    static AvoidSet around_vertices(const GraphSpec& spec, const std::vector<uint64_t>& vertices);

    void insert(const GraphSpec& spec, uint64_t u, uint64_t v);
    bool contains_key(uint64_t edge_key) const { return keys_.count(edge_key) != 0; }
    bool empty() const { return keys_.empty(); }
    size_t size() const { return keys_.size(); }
    const std::unordered_set<uint64_t>& keys() const { return keys_; }

private:
    std::unordered_set<uint64_t> keys_;
};

constexpr uint64_t kUnlimited = std::numeric_limits<uint64_t>::max();

struct ExploreOptions {
    uint64_t r_max = kUnlimited;    // deepest layer to materialize
    uint64_t size_cap = kUnlimited; // stop once this many vertices are found
    const AvoidSet* avoid = nullptr;
    bool with_diameter = false;     // all-sources BFS; skipped when truncated
};

struct ClusterReport {
    uint64_t root = 0;
    uint64_t size = 0;
    uint64_t edge_count = 0;              // open intra-cluster edges, each once
    std::vector<uint64_t> layers;         // layers[r] = |∂B_root(r)|
    std::vector<uint64_t> vertices;       // BFS discovery order
    int64_t diameter = -1;                // -1 when not requested or truncated
    bool truncated = false;               // a cap stopped exploration

    bool operator==(const ClusterReport& o) const {
        return root == o.root && size == o.size && edge_count == o.edge_count &&
               layers == o.layers && vertices == o.vertices && diameter == o.diameter &&
               truncated == o.truncated;
    }
};

// Reusable BFS workspace bound to one graph spec. Visited state is a dense
// bitmap when V ≤ 2^27 (cleared per-cluster, so reuse is O(cluster)), and a
// hash set beyond that. Safe for one thread; allocate one per worker.
class ClusterExplorer {
public:
    explicit ClusterExplorer(const GraphSpec& spec);

    ClusterReport explore(const PercolationSample& sample, uint64_t root,
                          const ExploreOptions& opts = {});

    // Same BFS with openness read from an explicit assignment over the
    // canonical edge order (edge_index[key] -> bit position).
    ClusterReport explore_masked(const GraphSpec& spec, const std::vector<uint32_t>& edge_index,
                                 const std::vector<bool>& open_bits, uint64_t root,
                                 const ExploreOptions& opts = {});

    const GraphSpec& spec() const { return spec_; }

private:
    template <class OpenFn>
    ClusterReport run(uint64_t root, const ExploreOptions& opts, OpenFn&& open);

    bool is_seen(uint64_t v, uint32_t& order_out) const;
    void mark_seen(uint64_t v, uint32_t order);
    void clear_marks(const std::vector<uint64_t>& vertices);

    GraphSpec spec_;
    bool dense_;
    std::vector<uint64_t> bitmap_;                       // dense mode
    std::unordered_map<uint64_t, uint32_t> order_map_;   // vertex -> discovery index
};

// One-shot helpers (allocate a fresh workspace).
ClusterReport explore_cluster(const PercolationSample& sample, uint64_t root,
                              const ExploreOptions& opts = {});

// Exact diameter of one open cluster by all-sources BFS. Domain error when
// the vertex set is not a single connected open cluster.
int64_t cluster_diameter(const PercolationSample& sample, const std::vector<uint64_t>& vertices);

struct LaneCensus {
    std::vector<uint64_t> lanes_per_level;  // index j in [1, r'-1]; [0] unused
    bool lane_rich = false;                 // more than half of levels in [k/2, k] have >= ell lanes
};

// Counts, for each level j in (0, r'), the open edges between ∂B_v(j-1) and
// ∂B_v(j) from which an open path reaches ∂B_v(r') without revisiting
// ∂B_v(j-1) after its start.
LaneCensus lane_census(const PercolationSample& sample, uint64_t v, uint64_t k, uint64_t r_prime,
                       uint64_t ell);

}  // namespace perclab
