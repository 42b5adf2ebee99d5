#include "census.hpp"

#include <algorithm>
#include <numeric>

#include "errors.hpp"

namespace perclab {

namespace {

// Union-find with path halving and union by size; ties go to the smaller
// root id so the forest is independent of edge processing order details.
struct UnionFind {
    std::vector<uint32_t> parent;
    std::vector<uint32_t> size;
    std::vector<uint64_t> edges;  // open edges inside the component at the root

    explicit UnionFind(uint64_t n) : parent(n), size(n, 1), edges(n, 0) {
        std::iota(parent.begin(), parent.end(), 0u);
    }

    uint32_t find(uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void add_edge(uint32_t u, uint32_t w) {
        uint32_t ru = find(u), rw = find(w);
        if (ru == rw) {
            ++edges[ru];
            return;
        }
        if (size[ru] < size[rw] || (size[ru] == size[rw] && rw < ru)) std::swap(ru, rw);
        parent[rw] = ru;
        size[ru] += size[rw];
        edges[ru] += edges[rw] + 1;
    }
};

}  // namespace

CensusSummary census(const PercolationSample& sample, const CensusOptions& opts) {
    const GraphSpec& spec = sample.spec;
    const uint64_t V = spec.vertex_count;
    if (V > opts.memory_budget_vertices) {
        throw ResourceError("census vertex count " + std::to_string(V) +
                            " exceeds the memory budget " +
                            std::to_string(opts.memory_budget_vertices) +
                            "; use the sampled estimators instead");
    }

    UnionFind uf(V);
    // Canonical EdgeId order: base ascending, direction ascending. Each edge
    // appears exactly once with base = min endpoint.
    for (uint64_t v = 0; v < V; ++v) {
        for (uint32_t dir = 0; dir < spec.degree; ++dir) {
            const uint64_t w = neighbor(spec, v, dir);
            if (w < v) continue;
            if (sample.open_key(v * spec.degree + dir)) {
                uf.add_edge(static_cast<uint32_t>(v), static_cast<uint32_t>(w));
            }
        }
    }

    CensusSummary out;
    out.sizes.reserve(V / 2);
    for (uint64_t v = 0; v < V; ++v) {
        if (uf.find(static_cast<uint32_t>(v)) == v) {
            out.sizes.push_back(uf.size[v]);
            out.max_edge_count = std::max(out.max_edge_count, uf.edges[v]);
        }
    }
    std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
    out.cluster_count = out.sizes.size();

    if (!opts.z_thresholds.empty()) {
        // Prefix sums over the sorted sizes; Z_{>=k} is the total mass of the
        // prefix whose entries are >= k.
        std::vector<uint64_t> prefix(out.sizes.size() + 1, 0);
        for (size_t i = 0; i < out.sizes.size(); ++i) prefix[i + 1] = prefix[i] + out.sizes[i];
        for (uint64_t k : opts.z_thresholds) {
            // First entry strictly below k in the descending list.
            const auto it = std::upper_bound(out.sizes.begin(), out.sizes.end(), k,
                                             [](uint64_t a, uint64_t b) { return a > b; });
            const size_t count = static_cast<size_t>(it - out.sizes.begin());
            out.z_geq.emplace_back(k, prefix[count]);
        }
    }

    const bool want_members =
        opts.diameters || !opts.d_radii.empty() || opts.top_representatives > 0;
    if (!want_members) return out;

    // Cluster membership lists, grouped by root, members ascending.
    std::vector<uint32_t> root_of(V);
    for (uint64_t v = 0; v < V; ++v) root_of[v] = uf.find(static_cast<uint32_t>(v));
    std::vector<uint32_t> cluster_index(V, 0);
    std::vector<uint64_t> cluster_root;
    std::vector<uint64_t> cluster_size;
    for (uint64_t v = 0; v < V; ++v) {
        if (root_of[v] == v) {
            cluster_index[v] = static_cast<uint32_t>(cluster_root.size());
            cluster_root.push_back(v);
            cluster_size.push_back(uf.size[v]);
        }
    }
    std::vector<uint64_t> offsets(cluster_root.size() + 1, 0);
    for (uint64_t v = 0; v < V; ++v) ++offsets[cluster_index[root_of[v]] + 1];
    for (size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    std::vector<uint64_t> members(V);
    {
        std::vector<uint64_t> cursor(offsets.begin(), offsets.end() - 1);
        for (uint64_t v = 0; v < V; ++v) members[cursor[cluster_index[root_of[v]]]++] = v;
    }

    // Clusters by size descending, root ascending: drives the diameter early
    // stop and the representative list.
    std::vector<uint32_t> order(cluster_root.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (cluster_size[a] != cluster_size[b]) return cluster_size[a] > cluster_size[b];
        return cluster_root[a] < cluster_root[b];
    });

    for (uint32_t i = 0; i < opts.top_representatives && i < order.size(); ++i) {
        out.top_roots.push_back(cluster_root[order[i]]);
    }

    auto members_of = [&](uint32_t ci) {
        return std::vector<uint64_t>(members.begin() + offsets[ci], members.begin() + offsets[ci + 1]);
    };

    if (opts.diameters) {
        int64_t best = 0;
        for (uint32_t ci : order) {
            if (static_cast<int64_t>(cluster_size[ci]) - 1 <= best) break;
            best = std::max(best, cluster_diameter(sample, members_of(ci)));
        }
        out.delta_max = best;
    }

    if (!opts.d_radii.empty()) {
        const uint64_t r_min_pos = [&] {
            uint64_t rm = kUnlimited;
            for (uint64_t r : opts.d_radii) if (r > 0) rm = std::min(rm, r);
            return rm;
        }();
        std::vector<uint64_t> counts(opts.d_radii.size(), 0);
        // r = 0 counts every vertex of every size-eligible cluster.
        for (size_t k = 0; k < opts.d_radii.size(); ++k) {
            if (opts.d_radii[k] != 0) continue;
            uint64_t c = 0;
            for (size_t ci = 0; ci < cluster_size.size(); ++ci) {
                if (cluster_size[ci] <= opts.d_size_threshold) c += cluster_size[ci];
            }
            counts[k] = c;
        }
        if (r_min_pos != kUnlimited) {
            uint64_t r_top = 0;
            for (uint64_t r : opts.d_radii) r_top = std::max(r_top, r);
            ClusterExplorer explorer(spec);
            ExploreOptions eo;
            eo.r_max = r_top;  // ecc is only compared against radii <= r_top
            for (size_t ci = 0; ci < cluster_size.size(); ++ci) {
                const uint64_t sz = cluster_size[ci];
                if (sz > opts.d_size_threshold || sz < r_min_pos + 1) continue;
                // Eccentricity of every member in the intrinsic metric.
                const auto mem = members_of(static_cast<uint32_t>(ci));
                for (uint64_t v : mem) {
                    const ClusterReport rep = explorer.explore(sample, v, eo);
                    const uint64_t ecc = rep.layers.size() - 1;
                    for (size_t k = 0; k < opts.d_radii.size(); ++k) {
                        if (opts.d_radii[k] > 0 && ecc >= opts.d_radii[k]) ++counts[k];
                    }
                }
            }
        }
        for (size_t k = 0; k < opts.d_radii.size(); ++k) {
            out.d_r.emplace_back(opts.d_radii[k], counts[k]);
        }
    }

    return out;
}

uint64_t jth_largest(const CensusSummary& summary, uint64_t j) {
    if (j == 0) throw DomainError("rank j must be >= 1");
    return j <= summary.sizes.size() ? summary.sizes[j - 1] : 0;
}

}  // namespace perclab
