#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "graph.hpp"
#include "percolation.hpp"

namespace perclab {

// Every undirected edge once: ascending base vertex, ascending direction,
// base < other endpoint. Position in this list is the edge's bit in a forced
// assignment mask.
std::vector<EdgeId> canonical_edges(const GraphSpec& spec);

// Dense canonical-key -> list-position map consumed by explore_masked.
// Non-canonical slots hold UINT32_MAX.
std::vector<uint32_t> canonical_edge_index(const GraphSpec& spec);

// Exact percolation law of a tiny spec, by complete enumeration of all
// 2^{|E|} edge configurations weighted p^{#open} (1-p)^{#closed}.
struct ExactLaw {
    GraphSpec spec;
    double p = 0.0;
    uint64_t root = 0;
    long double susceptibility = 0.0L;   // E|C(root)|
    long double largest = 0.0L;          // E|C_1|
    long double triangle = 0.0L;         // sum_{x,y} tau(root,x) tau(x,y) tau(y,root)
    std::vector<long double> size_dist;  // [k] = P(|C(root)| = k), k in [0, V]
    std::vector<long double> onearm;     // [r] = P(∂B_root(r) != ∅), r in [0, r_cap]
    std::vector<long double> boundary;   // [r] = E|∂B_root(r)|
    std::vector<long double> tau;        // row-major V x V connection matrix

    long double tau_at(uint64_t x, uint64_t y) const {
        return tau[x * spec.vertex_count + y];
    }
    // P(|C(root)| >= k), from the size distribution.
    long double tail_at(uint64_t k) const;
};

// Enumerates every configuration; resource error when |E| > 20. r_max caps
// the radius range reported (clusters themselves are always explored fully);
// the default keeps every radius the graph can realize.
ExactLaw enumerate_exact(const GraphSpec& spec, double p, uint64_t root = 0,
                         uint64_t r_max = kUnlimited);

// The percolation-core BFS run on one explicit edge assignment. Bit i of
// `mask` opens canonical_edges(spec)[i].
ClusterReport forced_assignment_bfs(const GraphSpec& spec, uint32_t mask, uint64_t root,
                                    uint64_t r_max = kUnlimited);

// Human-readable fixture lines for one exact law:
//   <spec>/<p>/<observable>[/<index>] = <value>
std::string fixture_text(const ExactLaw& law);

// Parses fixture text (comments and blank lines skipped) into key -> value.
std::map<std::string, long double> parse_fixtures(std::istream& in);

}  // namespace perclab
