#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "graph.hpp"
#include "errors.hpp"

#include <algorithm>
#include <set>
#include <vector>

using namespace perclab;

TEST_CASE("family sizes and degrees") {
    const GraphSpec q6 = GraphSpec::hypercube(6);
    CHECK(q6.vertex_count == 64);
    CHECK(q6.degree == 6);
    CHECK(q6.edge_count() == 64 * 6 / 2);

    const GraphSpec t52 = GraphSpec::torus(5, 2);
    CHECK(t52.vertex_count == 25);
    CHECK(t52.degree == 4);

    const GraphSpec k7 = GraphSpec::complete(7);
    CHECK(k7.vertex_count == 7);
    CHECK(k7.degree == 6);
    CHECK(k7.edge_count() == 21);

    const GraphSpec k43 = GraphSpec::complete_product(4, 3);
    CHECK(k43.vertex_count == 64);
    CHECK(k43.degree == 9);

    CHECK(GraphSpec::hypercube(3).edge_count() == 12);
    CHECK(GraphSpec::torus(3, 2).edge_count() == 18);
}

TEST_CASE("neighbor order contracts") {
    const GraphSpec q3 = GraphSpec::hypercube(3);
    CHECK(neighbors(q3, 0) == std::vector<uint64_t>{1, 2, 4});
    CHECK(neighbors(q3, 5) == std::vector<uint64_t>{4, 7, 1});

    // Torus directions come in (+1, -1) pairs per coordinate, least
    // significant coordinate first.
    const GraphSpec t42 = GraphSpec::torus(4, 2);
    CHECK(neighbors(t42, 0) == std::vector<uint64_t>{1, 3, 4, 12});

    const GraphSpec k4 = GraphSpec::complete(4);
    CHECK(neighbors(k4, 2) == std::vector<uint64_t>{0, 1, 3});

    const GraphSpec k32 = GraphSpec::complete_product(3, 2);
    CHECK(neighbors(k32, 0) == std::vector<uint64_t>{1, 2, 3, 6});
    CHECK(neighbors(k32, 4) == std::vector<uint64_t>{3, 5, 1, 7});
}

TEST_CASE("neighbor symmetry and simplicity") {
    const std::vector<GraphSpec> specs = {
        GraphSpec::hypercube(4), GraphSpec::torus(3, 2), GraphSpec::torus(5, 1),
        GraphSpec::complete(5), GraphSpec::complete_product(3, 3)};
    for (const GraphSpec& spec : specs) {
        CAPTURE(spec_to_string(spec));
        for (uint64_t v = 0; v < spec.vertex_count; ++v) {
            std::set<uint64_t> seen;
            for (uint32_t dir = 0; dir < spec.degree; ++dir) {
                const uint64_t w = neighbor(spec, v, dir);
                CHECK(w < spec.vertex_count);
                CHECK(w != v);
                CHECK(seen.insert(w).second);
                // the reverse direction walks back
                CHECK(neighbor(spec, w, reverse_direction(spec, v, dir, w)) == v);
                CHECK(direction_between(spec, v, w) == dir);
            }
        }
    }
}

TEST_CASE("edge keys are injective and orientation canonical") {
    const std::vector<GraphSpec> specs = {GraphSpec::hypercube(4),
                                          GraphSpec::torus(3, 2),
                                          GraphSpec::complete(5)};
    for (const GraphSpec& spec : specs) {
        CAPTURE(spec_to_string(spec));
        std::set<uint64_t> keys;
        for (uint64_t v = 0; v < spec.vertex_count; ++v) {
            for (uint32_t dir = 0; dir < spec.degree; ++dir) {
                const uint64_t w = neighbor(spec, v, dir);
                const EdgeId e = canonical_edge(spec, v, w);
                const EdgeId back = canonical_edge(spec, w, v);
                CHECK(e.base == back.base);
                CHECK(e.dir == back.dir);
                CHECK(edge_key_from(spec, v, dir, w) == e.key(spec));
                keys.insert(e.key(spec));
            }
        }
        CHECK(keys.size() == spec.edge_count());
    }
}

TEST_CASE("group difference matches the family's group law") {
    const GraphSpec q5 = GraphSpec::hypercube(5);
    CHECK(group_diff(q5, 19, 5) == (19 ^ 5));
    CHECK(group_diff(q5, 5, 19) == (19 ^ 5));
    CHECK(group_diff(q5, 7, 7) == 0);

    const GraphSpec t51 = GraphSpec::torus(5, 1);
    CHECK(group_diff(t51, 1, 4) == 2);  // 1 - 4 mod 5
    CHECK(group_diff(t51, 4, 1) == 3);

    const GraphSpec t32 = GraphSpec::torus(3, 2);
    // digits (x0, x1) with x = x0 + 3 x1; (2,1) - (1,2) = (1,2) digitwise
    CHECK(group_diff(t32, 2 + 3 * 1, 1 + 3 * 2) == 1 + 3 * 2);

    // differences of neighbors enumerate the generator set exactly once
    for (const GraphSpec& spec :
         {GraphSpec::complete(6), GraphSpec::complete_product(3, 2)}) {
        std::set<uint64_t> gens;
        for (uint32_t dir = 0; dir < spec.degree; ++dir)
            gens.insert(group_diff(spec, neighbor(spec, 0, dir), 0));
        CHECK(gens.size() == spec.degree);
        for (uint64_t v : {uint64_t{1}, spec.vertex_count - 1}) {
            std::set<uint64_t> at_v;
            for (uint32_t dir = 0; dir < spec.degree; ++dir)
                at_v.insert(group_diff(spec, neighbor(spec, v, dir), v));
            CHECK(at_v == gens);  // vertex transitivity of the generator set
        }
    }
}

TEST_CASE("spec parsing round trips") {
    for (const char* name : {"Q7", "T5^3", "K9", "K3^4"}) {
        const GraphSpec spec = parse_spec(name);
        CHECK(spec_to_string(spec) == name);
        CHECK(parse_spec(spec_to_string(spec)) == spec);
    }
    CHECK(parse_spec("Q3") == GraphSpec::hypercube(3));
    CHECK(parse_spec("T4^2") == GraphSpec::torus(4, 2));
    CHECK(parse_spec("K5") == GraphSpec::complete(5));
    CHECK(parse_spec("K4^2") == GraphSpec::complete_product(4, 2));
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS((void)parse_spec(""), DomainError);
    CHECK_THROWS_AS((void)parse_spec("Q"), DomainError);
    CHECK_THROWS_AS((void)parse_spec("Q0"), DomainError);
    CHECK_THROWS_AS((void)parse_spec("X4"), DomainError);
    CHECK_THROWS_AS((void)parse_spec("T2^3"), DomainError);  // n >= 3 for tori
    CHECK_THROWS_AS((void)parse_spec("K1"), DomainError);
    CHECK_THROWS_AS((void)parse_spec("Q3junk"), DomainError);
    CHECK_THROWS_AS((void)GraphSpec::torus(2, 4), DomainError);
    CHECK_THROWS_AS((void)GraphSpec::hypercube(0), DomainError);

    const GraphSpec q3 = GraphSpec::hypercube(3);
    CHECK_THROWS_AS(check_vertex(q3, 8), DomainError);
    CHECK_NOTHROW(check_vertex(q3, 7));
    CHECK_THROWS_AS((void)direction_between(q3, 0, 3), DomainError);
    CHECK_THROWS_AS((void)direction_between(q3, 3, 3), DomainError);
}
