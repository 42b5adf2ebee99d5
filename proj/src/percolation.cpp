#include "percolation.hpp"

#include <algorithm>
#include <queue>

#include "errors.hpp"

namespace perclab {

AvoidSet AvoidSet::from_edges(const GraphSpec& spec,
                              const std::vector<std::pair<uint64_t, uint64_t>>& edges) {
    AvoidSet out;
    for (const auto& [u, v] : edges) out.insert(spec, u, v);
    return out;
}

AvoidSet AvoidSet::around_vertices(const GraphSpec& spec, const std::vector<uint64_t>& vertices) {
    AvoidSet out;
    for (uint64_t v : vertices) {
        check_vertex(spec, v);
        for (uint32_t dir = 0; dir < spec.degree; ++dir) {
            const uint64_t w = neighbor(spec, v, dir);
            out.keys_.insert(canonical_edge(spec, v, w).key(spec));
        }
    }
    return out;
}

void AvoidSet::insert(const GraphSpec& spec, uint64_t u, uint64_t v) {
    keys_.insert(canonical_edge(spec, u, v).key(spec));
}

namespace {
constexpr uint64_t kDenseLimit = 1ull << 27;
}

ClusterExplorer::ClusterExplorer(const GraphSpec& spec)
    : spec_(spec), dense_(spec.vertex_count <= kDenseLimit) {
    if (dense_) bitmap_.assign((spec.vertex_count + 63) / 64, 0);
}

bool ClusterExplorer::is_seen(uint64_t v, uint32_t& order_out) const {
    if (dense_ && !(bitmap_[v >> 6] & (1ull << (v & 63)))) return false;
    const auto it = order_map_.find(v);
    if (it == order_map_.end()) return false;
    order_out = it->second;
    return true;
}

void ClusterExplorer::mark_seen(uint64_t v, uint32_t order) {
    if (dense_) bitmap_[v >> 6] |= 1ull << (v & 63);
    order_map_.emplace(v, order);
}

void ClusterExplorer::clear_marks(const std::vector<uint64_t>& vertices) {
    if (dense_) {
        for (uint64_t v : vertices) bitmap_[v >> 6] &= ~(1ull << (v & 63));
    }
    order_map_.clear();
}

template <class OpenFn>
ClusterReport ClusterExplorer::run(uint64_t root, const ExploreOptions& opts, OpenFn&& open) {
    check_vertex(spec_, root);
    ClusterReport report;
    report.root = root;

    // parent_order[i] = discovery index of the BFS parent of vertices[i]
    // (itself for the root). Used to keep the parent edge out of the
    // non-tree count below.
    std::vector<uint32_t> parent_order;
    std::vector<uint64_t>& verts = report.vertices;

    verts.push_back(root);
    parent_order.push_back(0);
    mark_seen(root, 0);
    report.layers.push_back(1);

    uint64_t edge_count = 0;
    bool truncated = false;
    bool size_capped = (opts.size_cap <= 1);
    if (size_capped) truncated = true;  // the root was never scanned

    // Frontier [layer_begin, layer_end) indexes into verts.
    size_t layer_begin = 0, layer_end = 1;
    uint64_t depth = 0;
    while (layer_begin < layer_end && !size_capped) {
        if (depth >= opts.r_max) {
            truncated = true;  // a non-empty layer at r_max was not scanned
            break;
        }
        uint64_t next_layer = 0;
        for (size_t i = layer_begin; i < layer_end && !size_capped; ++i) {
            const uint64_t u = verts[i];
            const uint32_t u_order = static_cast<uint32_t>(i);
            const uint32_t u_parent = parent_order[i];
            for (uint32_t dir = 0; dir < spec_.degree; ++dir) {
                const uint64_t w = neighbor(spec_, u, dir);
                const uint64_t key = edge_key_from(spec_, u, dir, w);
                if (!open(key)) continue;
                if (opts.avoid && opts.avoid->contains_key(key)) continue;
                uint32_t w_order = 0;
                if (is_seen(w, w_order)) {
                    // Count each non-tree open edge once: at the scan of the
                    // endpoint discovered later, excluding the tree edge to
                    // the parent (discovery orders are unique, so w_order ==
                    // u_parent identifies the parent edge).
                    if (w_order < u_order && w_order != u_parent) ++edge_count;
                    continue;
                }
                if (verts.size() >= opts.size_cap) {
                    truncated = true;
                    size_capped = true;
                    break;
                }
                mark_seen(w, static_cast<uint32_t>(verts.size()));
                verts.push_back(w);
                parent_order.push_back(u_order);
                ++edge_count;  // tree edge, counted at insertion
                ++next_layer;
            }
        }
        if (size_capped) {
            // The layer under construction is merged into the count below.
            if (next_layer > 0) report.layers.push_back(next_layer);
            break;
        }
        if (next_layer == 0) break;
        report.layers.push_back(next_layer);
        layer_begin = layer_end;
        layer_end = verts.size();
        ++depth;
    }

    report.size = verts.size();
    report.edge_count = edge_count;
    report.truncated = truncated;
    clear_marks(verts);
    return report;
}

ClusterReport ClusterExplorer::explore(const PercolationSample& sample, uint64_t root,
                                       const ExploreOptions& opts) {
    if (!(sample.spec == spec_)) throw DomainError("sample spec differs from explorer spec");
    ClusterReport report = run(root, opts, [&](uint64_t key) { return sample.open_key(key); });
    if (opts.with_diameter && !report.truncated) {
        report.diameter = cluster_diameter(sample, report.vertices);
    }
    return report;
}

ClusterReport ClusterExplorer::explore_masked(const GraphSpec& spec,
                                              const std::vector<uint32_t>& edge_index,
                                              const std::vector<bool>& open_bits, uint64_t root,
                                              const ExploreOptions& opts) {
    if (!(spec == spec_)) throw DomainError("spec differs from explorer spec");
    return run(root, opts, [&](uint64_t key) { return open_bits[edge_index[key]]; });
}

ClusterReport explore_cluster(const PercolationSample& sample, uint64_t root,
                              const ExploreOptions& opts) {
    ClusterExplorer explorer(sample.spec);
    return explorer.explore(sample, root, opts);
}

namespace {

// Local CSR adjacency over the open edges among `vertices`.
struct LocalGraph {
    std::vector<uint32_t> offsets;
    std::vector<uint32_t> adj;
    size_t size = 0;
};

LocalGraph build_local_graph(const PercolationSample& sample,
                             const std::vector<uint64_t>& vertices) {
    LocalGraph g;
    g.size = vertices.size();
    std::unordered_map<uint64_t, uint32_t> local;
    local.reserve(vertices.size() * 2);
    for (size_t i = 0; i < vertices.size(); ++i) {
        check_vertex(sample.spec, vertices[i]);
        if (!local.emplace(vertices[i], static_cast<uint32_t>(i)).second) {
            throw DomainError("duplicate vertex in cluster set");
        }
    }
    std::vector<std::vector<uint32_t>> tmp(vertices.size());
    for (size_t i = 0; i < vertices.size(); ++i) {
        const uint64_t u = vertices[i];
        for (uint32_t dir = 0; dir < sample.spec.degree; ++dir) {
            const uint64_t w = neighbor(sample.spec, u, dir);
            const auto it = local.find(w);
            if (it == local.end()) continue;
            if (sample.open_key(edge_key_from(sample.spec, u, dir, w))) tmp[i].push_back(it->second);
        }
    }
    g.offsets.assign(vertices.size() + 1, 0);
    for (size_t i = 0; i < tmp.size(); ++i) g.offsets[i + 1] = g.offsets[i] + tmp[i].size();
    g.adj.reserve(g.offsets.back());
    for (const auto& row : tmp) g.adj.insert(g.adj.end(), row.begin(), row.end());
    return g;
}

// Farthest distance from src; SIZE_MAX if the set is not fully reachable.
int64_t bfs_eccentricity(const LocalGraph& g, uint32_t src, std::vector<int32_t>& dist) {
    dist.assign(g.size, -1);
    std::vector<uint32_t> queue;
    queue.reserve(g.size);
    queue.push_back(src);
    dist[src] = 0;
    int64_t ecc = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        const uint32_t u = queue[head];
        for (uint32_t j = g.offsets[u]; j < g.offsets[u + 1]; ++j) {
            const uint32_t w = g.adj[j];
            if (dist[w] >= 0) continue;
            dist[w] = dist[u] + 1;
            ecc = std::max<int64_t>(ecc, dist[w]);
            queue.push_back(w);
        }
    }
    if (queue.size() != g.size) return -1;
    return ecc;
}

}  // namespace

int64_t cluster_diameter(const PercolationSample& sample, const std::vector<uint64_t>& vertices) {
    if (vertices.empty()) throw DomainError("empty vertex set has no diameter");
    if (vertices.size() == 1) return 0;
    const LocalGraph g = build_local_graph(sample, vertices);
    std::vector<int32_t> dist;
    int64_t diameter = 0;
    for (uint32_t src = 0; src < g.size; ++src) {
        const int64_t ecc = bfs_eccentricity(g, src, dist);
        if (ecc < 0) throw DomainError("vertex set is not a single connected open cluster");
        diameter = std::max(diameter, ecc);
    }
    return diameter;
}

LaneCensus lane_census(const PercolationSample& sample, uint64_t v, uint64_t k, uint64_t r_prime,
                       uint64_t ell) {
    check_vertex(sample.spec, v);
    if (r_prime == 0) throw DomainError("reach radius must be positive");
    if (k >= r_prime) throw DomainError("level-range bound k must satisfy k < r'");

    // Full intrinsic ball to radius r'; deeper vertices are irrelevant to
    // level membership but may carry connecting paths, so paths are traced on
    // the unrestricted configuration below.
    const ClusterReport ball = explore_cluster(sample, v, {.r_max = r_prime});
    std::unordered_map<uint64_t, uint64_t> level;  // vertex -> intrinsic distance
    {
        size_t idx = 0;
        for (uint64_t r = 0; r < ball.layers.size(); ++r) {
            for (uint64_t c = 0; c < ball.layers[r]; ++c) level[ball.vertices[idx++]] = r;
        }
    }

    LaneCensus out;
    out.lanes_per_level.assign(r_prime, 0);
    const bool reachable = ball.layers.size() > r_prime && ball.layers[r_prime] > 0;

    if (reachable) {
        // Layer membership lists.
        std::vector<std::vector<uint64_t>> layer_vertices(ball.layers.size());
        for (const auto& [vertex, r] : level) layer_vertices[r].push_back(vertex);
        for (auto& lv : layer_vertices) std::sort(lv.begin(), lv.end());

        for (uint64_t j = 1; j < r_prime; ++j) {
            uint64_t lanes = 0;
            for (uint64_t a : layer_vertices[j - 1]) {
                for (uint32_t dir = 0; dir < sample.spec.degree; ++dir) {
                    const uint64_t b = neighbor(sample.spec, a, dir);
                    const auto itb = level.find(b);
                    if (itb == level.end() || itb->second != j) continue;
                    if (!sample.edge_open_id(canonical_edge(sample.spec, a, b))) continue;
                    // Open path from b to ∂B_v(r') that never re-enters
                    // layer j-1.
                    std::unordered_set<uint64_t> visited{b};
                    std::vector<uint64_t> queue{b};
                    bool reached = false;
                    for (size_t head = 0; head < queue.size() && !reached; ++head) {
                        const uint64_t x = queue[head];
                        for (uint32_t d2 = 0; d2 < sample.spec.degree; ++d2) {
                            const uint64_t y = neighbor(sample.spec, x, d2);
                            if (visited.count(y)) continue;
                            const auto ity = level.find(y);
                            if (ity != level.end() && ity->second == j - 1) continue;
                            if (!sample.edge_open_id(canonical_edge(sample.spec, x, y))) continue;
                            if (ity != level.end() && ity->second == r_prime) {
                                reached = true;
                                break;
                            }
                            visited.insert(y);
                            queue.push_back(y);
                        }
                    }
                    if (reached) ++lanes;
                }
            }
            out.lanes_per_level[j] = lanes;
        }
    }

    // Rich flag: levels j in [k/2, k], integer j, strict majority.
    const uint64_t j_lo = (k + 1) / 2;
    uint64_t levels_in_range = 0, rich_levels = 0;
    for (uint64_t j = std::max<uint64_t>(j_lo, 1); j <= k; ++j) {
        ++levels_in_range;
        if (out.lanes_per_level[j] >= ell) ++rich_levels;
    }
    out.lane_rich = levels_in_range > 0 && 2 * rich_levels > levels_in_range;
    return out;
}

}  // namespace perclab
