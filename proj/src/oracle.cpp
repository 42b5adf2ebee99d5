#include "oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "errors.hpp"

namespace perclab {

namespace {

constexpr uint32_t kMaxOracleEdges = 20;

// p^j (1-p)^{E-j} for every open-edge count j, computed in log space so that
// extreme p still produces finite weights, then exponentiated once per count.
std::vector<long double> weight_by_popcount(double p, uint32_t edge_count) {
    std::vector<long double> w(edge_count + 1, 0.0L);
    if (p == 0.0) {
        w[0] = 1.0L;
        return w;
    }
    if (p == 1.0) {
        w[edge_count] = 1.0L;
        return w;
    }
    const long double lp = std::log(static_cast<long double>(p));
    const long double lq = std::log1p(static_cast<long double>(-p));
    for (uint32_t j = 0; j <= edge_count; ++j) {
        w[j] = std::exp(static_cast<long double>(j) * lp +
                        static_cast<long double>(edge_count - j) * lq);
    }
    return w;
}

}  // namespace

std::vector<EdgeId> canonical_edges(const GraphSpec& spec) {
    std::vector<EdgeId> edges;
    edges.reserve(spec.edge_count());
    for (uint64_t v = 0; v < spec.vertex_count; ++v) {
        for (uint32_t dir = 0; dir < spec.degree; ++dir) {
            if (neighbor(spec, v, dir) > v) edges.push_back(EdgeId{v, dir});
        }
    }
    return edges;
}

std::vector<uint32_t> canonical_edge_index(const GraphSpec& spec) {
    const std::vector<EdgeId> edges = canonical_edges(spec);
    std::vector<uint32_t> index(spec.vertex_count * spec.degree, UINT32_MAX);
    for (size_t i = 0; i < edges.size(); ++i) {
        index[edges[i].key(spec)] = static_cast<uint32_t>(i);
    }
    return index;
}

long double ExactLaw::tail_at(uint64_t k) const {
    long double sum = 0.0L;
    for (uint64_t j = size_dist.size(); j-- > k;) sum += size_dist[j];
    return sum;
}

ExactLaw enumerate_exact(const GraphSpec& spec, double p, uint64_t root, uint64_t r_max) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
    check_vertex(spec, root);
    const std::vector<EdgeId> edges = canonical_edges(spec);
    const uint32_t E = static_cast<uint32_t>(edges.size());
    if (E > kMaxOracleEdges) {
        throw ResourceError("exact enumeration supports at most 20 edges, spec has " +
                            std::to_string(E));
    }
    const uint64_t V = spec.vertex_count;
    const uint64_t r_cap = std::min<uint64_t>(r_max, V - 1);

    ExactLaw law;
    law.spec = spec;
    law.p = p;
    law.root = root;
    law.size_dist.assign(V + 1, 0.0L);
    law.onearm.assign(r_cap + 1, 0.0L);
    law.boundary.assign(r_cap + 1, 0.0L);
    law.tau.assign(V * V, 0.0L);

    const std::vector<uint32_t> edge_index = canonical_edge_index(spec);
    const std::vector<long double> weight = weight_by_popcount(p, E);
    ClusterExplorer explorer(spec);
    std::vector<bool> open_bits(E, false);
    std::vector<uint64_t> cluster_of(V, 0);  // configuration-local cluster ids
    std::vector<bool> visited(V, false);

    const uint64_t masks = 1ull << E;
    for (uint64_t mask = 0; mask < masks; ++mask) {
        const long double w = weight[static_cast<uint32_t>(std::popcount(mask))];
        if (w == 0.0L) continue;
        for (uint32_t i = 0; i < E; ++i) open_bits[i] = (mask >> i) & 1u;

        // Root cluster first (its report carries the ball observables), then
        // the remaining clusters for the partition-level observables.
        const ClusterReport rep = explorer.explore_masked(spec, edge_index, open_bits, root, {});
        uint64_t visited_count = rep.size;
        uint64_t largest = rep.size;
        uint64_t next_cluster = 1;
        std::fill(visited.begin(), visited.end(), false);
        for (uint64_t v : rep.vertices) {
            cluster_of[v] = 0;
            visited[v] = true;
        }
        for (uint64_t v = 0; v < V && visited_count < V; ++v) {
            if (visited[v]) continue;
            const ClusterReport other = explorer.explore_masked(spec, edge_index, open_bits, v, {});
            for (uint64_t u : other.vertices) {
                visited[u] = true;
                cluster_of[u] = next_cluster;
            }
            ++next_cluster;
            visited_count += other.size;
            largest = std::max(largest, other.size);
        }

        law.susceptibility += w * static_cast<long double>(rep.size);
        law.size_dist[rep.size] += w;
        law.largest += w * static_cast<long double>(largest);
        const uint64_t deepest = std::min<uint64_t>(r_cap, rep.layers.size() - 1);
        for (uint64_t r = 0; r <= deepest; ++r) {
            law.onearm[r] += w;
            law.boundary[r] += w * static_cast<long double>(rep.layers[r]);
        }
        for (uint64_t x = 0; x < V; ++x) {
            for (uint64_t y = 0; y < V; ++y) {
                if (cluster_of[x] == cluster_of[y]) law.tau[x * V + y] += w;
            }
        }
    }

    for (uint64_t x = 0; x < V; ++x) {
        for (uint64_t y = 0; y < V; ++y) {
            law.triangle += law.tau_at(root, x) * law.tau_at(x, y) * law.tau_at(y, root);
        }
    }
    return law;
}

ClusterReport forced_assignment_bfs(const GraphSpec& spec, uint32_t mask, uint64_t root,
                                    uint64_t r_max) {
    const std::vector<EdgeId> edges = canonical_edges(spec);
    const uint32_t E = static_cast<uint32_t>(edges.size());
    if (E > kMaxOracleEdges) {
        throw ResourceError("forced assignments support at most 20 edges, spec has " +
                            std::to_string(E));
    }
    if (E < 32 && (mask >> E) != 0) {
        throw DomainError("assignment mask has bits beyond the edge count");
    }
    std::vector<bool> open_bits(E, false);
    for (uint32_t i = 0; i < E; ++i) open_bits[i] = (mask >> i) & 1u;
    ClusterExplorer explorer(spec);
    ExploreOptions opts;
    opts.r_max = r_max;
    return explorer.explore_masked(spec, canonical_edge_index(spec), open_bits, root, opts);
}

std::string fixture_text(const ExactLaw& law) {
    std::ostringstream out;
    std::ostringstream key;
    key << spec_to_string(law.spec) << "/" << law.p << "/";
    const std::string prefix = key.str();
    out << std::setprecision(21);
    out << prefix << "susceptibility = " << law.susceptibility << "\n";
    out << prefix << "largest = " << law.largest << "\n";
    out << prefix << "triangle = " << law.triangle << "\n";
    for (size_t r = 0; r < law.onearm.size(); ++r) {
        out << prefix << "onearm/" << r << " = " << law.onearm[r] << "\n";
    }
    for (size_t r = 0; r < law.boundary.size(); ++r) {
        out << prefix << "boundary/" << r << " = " << law.boundary[r] << "\n";
    }
    for (uint64_t k = 1; k <= law.spec.vertex_count; ++k) {
        out << prefix << "tail/" << k << " = " << law.tail_at(k) << "\n";
    }
    return out.str();
}

std::map<std::string, long double> parse_fixtures(std::istream& in) {
    std::map<std::string, long double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const size_t sep = line.find(" = ");
        if (sep == std::string::npos) throw DomainError("malformed fixture line: " + line);
        const std::string key = line.substr(0, sep);
        const std::string value = line.substr(sep + 3);
        char* end = nullptr;
        const long double parsed = std::strtold(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0') {
            throw DomainError("malformed fixture value: " + line);
        }
        out[key] = parsed;
    }
    return out;
}

}  // namespace perclab
