#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace perclab {

enum class GraphKind { Hypercube, Torus, Complete, CompleteProduct };

// Immutable descriptor of a transitive graph family instance. Adjacency is
// computed on demand; nothing is stored per vertex or per edge.
//
// Vertex ids are dense integers in [0, vertex_count). For the hypercube the
// id is the bit pattern; for Torus/CompleteProduct it is the mixed-radix
// encoding of the d coordinates, least significant coordinate first.
struct GraphSpec {
    GraphKind kind;
    uint32_t n;  // Hypercube: bit count m; Torus/CompleteProduct/Complete: n
    uint32_t d;  // Torus/CompleteProduct: factor count; otherwise 1
    uint64_t vertex_count;
    uint32_t degree;

    static GraphSpec hypercube(uint32_t m);
    static GraphSpec torus(uint32_t n, uint32_t d);
    static GraphSpec complete(uint32_t n);
    static GraphSpec complete_product(uint32_t n, uint32_t d);

    uint64_t edge_count() const { return vertex_count * degree / 2; }
    bool operator==(const GraphSpec& o) const {
        return kind == o.kind && n == o.n && d == o.d;
    }
};

// Canonical undirected edge id: (min endpoint, direction index of the other
// endpoint in the min endpoint's neighbor list). Orientation independent and
// injective over the edge set.
struct EdgeId {
    uint64_t base;
    uint32_t dir;

    uint64_t key(const GraphSpec& spec) const {
        return base * spec.degree + dir;
    }
    bool operator==(const EdgeId& o) const {
        return base == o.base && dir == o.dir;
    }
};

// Neighbor in the fixed direction order. The order is part of the public
// contract (reproducible BFS tie-breaking):
//   Hypercube      dir i flips bit i
//   Torus          dirs (2c, 2c+1) are +1/-1 in coordinate c
//   Complete       the other vertices in ascending order
//   CompleteProduct per coordinate c, the other values in ascending order
uint64_t neighbor(const GraphSpec& spec, uint64_t v, uint32_t dir);

std::vector<uint64_t> neighbors(const GraphSpec& spec, uint64_t v);

// Direction index of `to` in `from`'s neighbor list. Domain error when the
// two vertices are not adjacent.
uint32_t direction_between(const GraphSpec& spec, uint64_t from, uint64_t to);

// Given w = neighbor(spec, u, dir), the direction from w back to u, computed
// without a full decode where the family allows it. Hot-path companion of
// canonical_edge.
uint32_t reverse_direction(const GraphSpec& spec, uint64_t u, uint32_t dir, uint64_t w);

// Canonical edge key of the edge (u, neighbor(u, dir)); the BFS and census
// inner loops use this instead of canonical_edge to avoid re-deriving the
// direction.
inline uint64_t edge_key_from(const GraphSpec& spec, uint64_t u, uint32_t dir, uint64_t w) {
    return u < w ? u * spec.degree + dir
                 : w * spec.degree + reverse_direction(spec, u, dir, w);
}

EdgeId canonical_edge(const GraphSpec& spec, uint64_t u, uint64_t v);

// Abelian group structure underlying each family (XOR for the hypercube,
// coordinatewise arithmetic mod n otherwise). Translations are graph
// automorphisms, so two-point functions depend only on the difference.
uint64_t group_diff(const GraphSpec& spec, uint64_t x, uint64_t y);

// Spec string syntax: Q<m>, T<n>^<d>, K<n>, K<n>^<d>.
GraphSpec parse_spec(const std::string& text);
std::string spec_to_string(const GraphSpec& spec);

void check_vertex(const GraphSpec& spec, uint64_t v);

}  // namespace perclab
