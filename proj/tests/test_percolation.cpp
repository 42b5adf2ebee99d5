#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "percolation.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

using namespace perclab;

namespace {

// Reference exploration written against the public sample interface only:
// plain queue BFS over open edges with a std::set frontier, no layer
// bookkeeping tricks. Slow and obviously correct.
struct RefCluster {
    std::vector<uint64_t> vertices;
    std::vector<uint64_t> layers;
    uint64_t edge_count = 0;
};

RefCluster ref_explore(const PercolationSample& sample, uint64_t root) {
    std::map<uint64_t, uint64_t> dist;
    dist[root] = 0;
    std::queue<uint64_t> q;
    q.push(root);
    std::set<std::pair<uint64_t, uint64_t>> edges;
    while (!q.empty()) {
        const uint64_t v = q.front();
        q.pop();
        for (uint32_t dir = 0; dir < sample.spec.degree; ++dir) {
            const uint64_t w = neighbor(sample.spec, v, dir);
            if (!sample.edge_open(v, w)) continue;
            edges.insert({std::min(v, w), std::max(v, w)});
            if (dist.count(w)) continue;
            dist[w] = dist[v] + 1;
            q.push(w);
        }
    }
    RefCluster out;
    out.edge_count = edges.size();
    uint64_t depth = 0;
    for (const auto& [v, d] : dist) depth = std::max(depth, d);
    out.layers.assign(depth + 1, 0);
    for (const auto& [v, d] : dist) {
        out.vertices.push_back(v);
        ++out.layers[d];
    }
    return out;
}

int64_t ref_diameter(const PercolationSample& sample,
                     const std::vector<uint64_t>& vertices) {
    // all-pairs over the cluster's open edges
    int64_t best = 0;
    const std::set<uint64_t> members(vertices.begin(), vertices.end());
    for (uint64_t s : vertices) {
        std::map<uint64_t, int64_t> dist;
        dist[s] = 0;
        std::queue<uint64_t> q;
        q.push(s);
        while (!q.empty()) {
            const uint64_t v = q.front();
            q.pop();
            for (uint32_t dir = 0; dir < sample.spec.degree; ++dir) {
                const uint64_t w = neighbor(sample.spec, v, dir);
                if (!sample.edge_open(v, w)) continue;
                if (!members.count(w) || dist.count(w)) continue;
                dist[w] = dist[v] + 1;
                best = std::max(best, dist[w]);
                q.push(w);
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("edge states are orientation independent and reproducible") {
    for (const GraphSpec& spec :
         {GraphSpec::hypercube(5), GraphSpec::torus(4, 2), GraphSpec::complete(6)}) {
        CAPTURE(spec_to_string(spec));
        const PercolationSample sample{spec, 0.4, 12345};
        const PercolationSample again{spec, 0.4, 12345};
        for (uint64_t v = 0; v < spec.vertex_count; ++v) {
            for (uint32_t dir = 0; dir < spec.degree; ++dir) {
                const uint64_t w = neighbor(spec, v, dir);
                CHECK(sample.edge_open(v, w) == sample.edge_open(w, v));
                CHECK(sample.edge_open(v, w) == again.edge_open(v, w));
            }
        }
    }
}

TEST_CASE("monotone coupling: open sets grow with p under a shared seed") {
    const GraphSpec spec = GraphSpec::hypercube(6);
    for (uint64_t seed : {7ull, 99ull, 4242ull}) {
        const PercolationSample lo{spec, 0.2, seed};
        const PercolationSample mid{spec, 0.5, seed};
        const PercolationSample hi{spec, 0.8, seed};
        for (uint64_t v = 0; v < spec.vertex_count; ++v) {
            for (uint32_t dir = 0; dir < spec.degree; ++dir) {
                const uint64_t w = neighbor(spec, v, dir);
                if (v > w) continue;
                if (lo.edge_open(v, w)) CHECK(mid.edge_open(v, w));
                if (mid.edge_open(v, w)) CHECK(hi.edge_open(v, w));
            }
        }
    }
}

TEST_CASE("open edge frequency tracks p") {
    const GraphSpec spec = GraphSpec::hypercube(10);
    const double p = 0.3;
    uint64_t open = 0, total = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const PercolationSample sample{spec, p, seed};
        for (uint64_t v = 0; v < spec.vertex_count; ++v) {
            for (uint32_t dir = 0; dir < spec.degree; ++dir) {
                const uint64_t w = neighbor(spec, v, dir);
                if (v > w) continue;  // each undirected edge once
                ++total;
                open += sample.edge_open(v, w) ? 1 : 0;
            }
        }
    }
    const double freq = double(open) / double(total);
    const double se = std::sqrt(p * (1 - p) / double(total));
    CHECK(std::abs(freq - p) < 5 * se);
}

TEST_CASE("explorer agrees with the reference BFS") {
    ClusterExplorer explorer(GraphSpec::hypercube(4));
    for (const GraphSpec& spec :
         {GraphSpec::hypercube(4), GraphSpec::torus(4, 2),
          GraphSpec::complete_product(3, 2)}) {
        CAPTURE(spec_to_string(spec));
        ClusterExplorer ex(spec);
        for (uint64_t seed = 0; seed < 12; ++seed) {
            for (double p : {0.15, 0.4, 0.8}) {
                const PercolationSample sample{spec, p, seed};
                const uint64_t root = (seed * 11) % spec.vertex_count;
                ExploreOptions opts;
                opts.with_diameter = true;
                const ClusterReport rep = ex.explore(sample, root, opts);
                const RefCluster ref = ref_explore(sample, root);
                CHECK(rep.size == ref.vertices.size());
                CHECK(rep.edge_count == ref.edge_count);
                CHECK(rep.layers == ref.layers);
                CHECK(!rep.truncated);
                std::vector<uint64_t> sorted = rep.vertices;
                std::sort(sorted.begin(), sorted.end());
                CHECK(sorted == ref.vertices);
                CHECK(rep.diameter == ref_diameter(sample, ref.vertices));
            }
        }
    }
}

TEST_CASE("radius and size caps truncate consistently") {
    const GraphSpec spec = GraphSpec::hypercube(7);
    const PercolationSample sample{spec, 0.35, 31337};
    ClusterExplorer ex(spec);

    const ClusterReport full = ex.explore(sample, 0, {});
    REQUIRE(full.size > 10);  // seed chosen to give a nontrivial cluster

    SUBCASE("r_max keeps exactly the first layers") {
        ExploreOptions opts;
        opts.r_max = 2;
        const ClusterReport rep = ex.explore(sample, 0, opts);
        REQUIRE(rep.layers.size() <= 3);
        for (size_t i = 0; i < rep.layers.size(); ++i)
            CHECK(rep.layers[i] == full.layers[i]);
        const uint64_t layer_sum =
            std::accumulate(rep.layers.begin(), rep.layers.end(), uint64_t{0});
        CHECK(layer_sum == rep.size);
        // a non-empty layer at r_max is never scanned, so reaching it counts
        // as truncation even when nothing lies beyond
        CHECK(rep.truncated == (full.layers.size() >= 3));
        CHECK(rep.diameter == -1);
    }

    SUBCASE("size_cap stops growth without losing the layer sum") {
        ExploreOptions opts;
        opts.size_cap = 8;
        const ClusterReport rep = ex.explore(sample, 0, opts);
        CHECK(rep.size >= 8);
        CHECK(rep.size <= full.size);
        CHECK(rep.truncated);
        const uint64_t layer_sum =
            std::accumulate(rep.layers.begin(), rep.layers.end(), uint64_t{0});
        CHECK(layer_sum == rep.size);
    }

    SUBCASE("caps larger than the cluster change nothing") {
        ExploreOptions opts;
        opts.r_max = 100;
        opts.size_cap = spec.vertex_count;
        const ClusterReport rep = ex.explore(sample, 0, opts);
        CHECK(rep == full);
    }
}

TEST_CASE("avoid sets mask vertices out of the exploration") {
    const GraphSpec spec = GraphSpec::hypercube(5);
    const PercolationSample sample{spec, 0.9, 5};
    ClusterExplorer ex(spec);
    const ClusterReport full = ex.explore(sample, 0, {});
    REQUIRE(full.size > 4);

    // block the whole first layer: the cluster collapses to the root
    AvoidSet avoid = AvoidSet::around_vertices(spec, {0});
    ExploreOptions opts;
    opts.avoid = &avoid;
    const ClusterReport rep = ex.explore(sample, 0, opts);
    CHECK(rep.size == 1);
    CHECK(rep.edge_count == 0);

    // blocking an unrelated vertex keeps counts consistent
    const PercolationSample sparse{spec, 0.4, 11};
    const ClusterReport full2 = ex.explore(sparse, 0, {});
    std::set<uint64_t> members(full2.vertices.begin(), full2.vertices.end());
    REQUIRE(members.size() < spec.vertex_count);
    uint64_t outsider = 0;
    while (members.count(outsider)) ++outsider;
    AvoidSet avoid2 = AvoidSet::around_vertices(spec, {outsider});
    ExploreOptions opts2;
    opts2.avoid = &avoid2;
    const ClusterReport rep2 = ex.explore(sparse, 0, opts2);
    CHECK(rep2.size <= full2.size);
    const uint64_t layer_sum =
        std::accumulate(rep2.layers.begin(), rep2.layers.end(), uint64_t{0});
    CHECK(layer_sum == rep2.size);
}

TEST_CASE("explore_masked matches explore on sample-built bits") {
    const GraphSpec spec = GraphSpec::hypercube(5);
    const PercolationSample sample{spec, 0.45, 77};
    ClusterExplorer ex(spec);
    const std::vector<EdgeId> edges = canonical_edges(spec);
    const std::vector<uint32_t> index = canonical_edge_index(spec);
    std::vector<bool> open_bits(edges.size(), false);
    for (size_t i = 0; i < edges.size(); ++i)
        open_bits[i] = sample.edge_open_id(edges[i]);
    for (uint64_t root = 0; root < spec.vertex_count; root += 5) {
        const ClusterReport a = ex.explore(sample, root, {});
        const ClusterReport b = ex.explore_masked(spec, index, open_bits, root, {});
        CHECK(a == b);
    }
}

TEST_CASE("one-shot explore_cluster and cluster_diameter helpers") {
    const GraphSpec spec = GraphSpec::torus(4, 2);
    const PercolationSample sample{spec, 0.5, 2024};
    ClusterExplorer ex(spec);
    const ClusterReport a = ex.explore(sample, 3, {});
    const ClusterReport b = explore_cluster(sample, 3, {});
    CHECK(a == b);
    CHECK(cluster_diameter(sample, a.vertices) == ref_diameter(sample, a.vertices));
}

namespace {

// Intrinsic distances from v over open edges, whole cluster.
std::map<uint64_t, uint64_t> ref_distances(const PercolationSample& sample,
                                           uint64_t v) {
    std::map<uint64_t, uint64_t> dist;
    dist[v] = 0;
    std::queue<uint64_t> q;
    q.push(v);
    while (!q.empty()) {
        const uint64_t x = q.front();
        q.pop();
        for (uint32_t dir = 0; dir < sample.spec.degree; ++dir) {
            const uint64_t y = neighbor(sample.spec, x, dir);
            if (!sample.edge_open(x, y)) continue;
            if (dist.count(y)) continue;
            dist[y] = dist[x] + 1;
            q.push(y);
        }
    }
    return dist;
}

// Straight transcription of the documented lane rule: an open edge a-b with
// dist(a) = j - 1, dist(b) = j counts when some open path from b reaches a
// vertex at distance exactly r' without stepping back onto distance j - 1.
uint64_t ref_lane_count(const PercolationSample& sample,
                        const std::map<uint64_t, uint64_t>& dist, uint64_t j,
                        uint64_t r_prime) {
    uint64_t lanes = 0;
    for (const auto& [a, da] : dist) {
        if (da != j - 1) continue;
        for (uint32_t dir = 0; dir < sample.spec.degree; ++dir) {
            const uint64_t b = neighbor(sample.spec, a, dir);
            if (!sample.edge_open(a, b)) continue;
            const auto itb = dist.find(b);
            if (itb == dist.end() || itb->second != j) continue;
            std::set<uint64_t> visited{b};
            std::queue<uint64_t> q;
            q.push(b);
            bool reached = (itb->second == r_prime);
            while (!q.empty() && !reached) {
                const uint64_t x = q.front();
                q.pop();
                for (uint32_t d2 = 0; d2 < sample.spec.degree; ++d2) {
                    const uint64_t y = neighbor(sample.spec, x, d2);
                    if (!sample.edge_open(x, y)) continue;
                    const auto ity = dist.find(y);
                    if (ity != dist.end() && ity->second == j - 1) continue;
                    if (ity != dist.end() && ity->second == r_prime) {
                        reached = true;
                        break;
                    }
                    if (visited.insert(y).second) q.push(y);
                }
            }
            if (reached) ++lanes;
        }
    }
    return lanes;
}

}  // namespace

TEST_CASE("lane census counts match a reference recomputation") {
    for (const GraphSpec& spec : {GraphSpec::hypercube(4), GraphSpec::torus(3, 2)}) {
        CAPTURE(spec_to_string(spec));
        for (uint64_t seed = 0; seed < 25; ++seed) {
            for (double p : {0.3, 0.6}) {
                const PercolationSample sample{spec, p, seed};
                const uint64_t k = 2, r_prime = 3, ell = 2;
                const LaneCensus lanes = lane_census(sample, 0, k, r_prime, ell);
                REQUIRE(lanes.lanes_per_level.size() == r_prime);

                const auto dist = ref_distances(sample, 0);
                const bool reachable =
                    std::any_of(dist.begin(), dist.end(),
                                [&](const auto& kv) { return kv.second == r_prime; });
                uint64_t rich = 0, in_range = 0;
                for (uint64_t j = 1; j < r_prime; ++j) {
                    const uint64_t want =
                        reachable ? ref_lane_count(sample, dist, j, r_prime) : 0;
                    CHECK(lanes.lanes_per_level[j] == want);
                    if (j >= (k + 1) / 2 && j <= k) {
                        ++in_range;
                        if (want >= ell) ++rich;
                    }
                }
                CHECK(lanes.lane_rich == (in_range > 0 && 2 * rich > in_range));
            }
        }
    }
}

TEST_CASE("lane census argument validation") {
    const PercolationSample sample{GraphSpec::hypercube(3), 0.5, 1};
    CHECK_THROWS_AS((void)lane_census(sample, 0, 1, 0, 1), DomainError);
    CHECK_THROWS_AS((void)lane_census(sample, 0, 3, 3, 1), DomainError);
    CHECK_THROWS_AS((void)lane_census(sample, 8, 1, 2, 1), DomainError);
}
