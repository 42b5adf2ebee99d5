#include "graph.hpp"

#include <bit>
#include <charconv>
#include <cstdlib>

#include "errors.hpp"

namespace perclab {

namespace {

constexpr uint64_t kMaxVertices = 1ull << 40;

uint64_t checked_pow(uint64_t base, uint32_t exp) {
    uint64_t v = 1;
    for (uint32_t i = 0; i < exp; ++i) {
        if (v > kMaxVertices / base) {
            throw DomainError("graph too large: vertex count exceeds 2^40");
        }
        v *= base;
    }
    return v;
}

uint64_t coord_stride(const GraphSpec& spec, uint32_t c) {
    uint64_t s = 1;
    for (uint32_t i = 0; i < c; ++i) s *= spec.n;
    return s;
}

}  // namespace

GraphSpec GraphSpec::hypercube(uint32_t m) {
    if (m < 1 || m > 40) throw DomainError("hypercube bit count must be in [1, 40]");
    return {GraphKind::Hypercube, m, 1, 1ull << m, m};
}

GraphSpec GraphSpec::torus(uint32_t n, uint32_t d) {
    if (n < 3) throw DomainError("torus side length must be >= 3 (shorter sides degenerate)");
    if (d < 1 || d > 40) throw DomainError("torus dimension must be in [1, 40]");
    return {GraphKind::Torus, n, d, checked_pow(n, d), 2 * d};
}

GraphSpec GraphSpec::complete(uint32_t n) {
    if (n < 2) throw DomainError("complete graph needs at least 2 vertices");
    return {GraphKind::Complete, n, 1, n, n - 1};
}

GraphSpec GraphSpec::complete_product(uint32_t n, uint32_t d) {
    if (n < 2) throw DomainError("clique size must be >= 2");
    if (d < 1 || d > 40) throw DomainError("factor count must be in [1, 40]");
    return {GraphKind::CompleteProduct, n, d, checked_pow(n, d), d * (n - 1)};
}

void check_vertex(const GraphSpec& spec, uint64_t v) {
    if (v >= spec.vertex_count) throw DomainError("vertex id out of range");
}

uint64_t neighbor(const GraphSpec& spec, uint64_t v, uint32_t dir) {
    switch (spec.kind) {
        case GraphKind::Hypercube:
            return v ^ (1ull << dir);
        case GraphKind::Torus: {
            const uint32_t c = dir / 2;
            const uint64_t stride = coord_stride(spec, c);
            const uint64_t digit = (v / stride) % spec.n;
            if ((dir & 1) == 0) {  // +1
                return digit + 1 == spec.n ? v - (uint64_t)(spec.n - 1) * stride
                                           : v + stride;
            }
            return digit == 0 ? v + (uint64_t)(spec.n - 1) * stride : v - stride;
        }
        case GraphKind::Complete:
            return dir < v ? dir : dir + 1ull;
        case GraphKind::CompleteProduct: {
            const uint32_t c = dir / (spec.n - 1);
            const uint32_t j = dir % (spec.n - 1);
            const uint64_t stride = coord_stride(spec, c);
            const uint64_t digit = (v / stride) % spec.n;
            const uint64_t other = j < digit ? j : j + 1ull;
            return v + (other - digit) * stride;
        }
    }
    throw DomainError("unknown graph kind");
}

std::vector<uint64_t> neighbors(const GraphSpec& spec, uint64_t v) {
    check_vertex(spec, v);
    std::vector<uint64_t> out;
    out.reserve(spec.degree);
    for (uint32_t dir = 0; dir < spec.degree; ++dir) out.push_back(neighbor(spec, v, dir));
    return out;
}

uint32_t direction_between(const GraphSpec& spec, uint64_t from, uint64_t to) {
    check_vertex(spec, from);
    check_vertex(spec, to);
    if (from == to) throw DomainError("no self-loops: vertices are equal");
    switch (spec.kind) {
        case GraphKind::Hypercube: {
            const uint64_t diff = from ^ to;
            if (!std::has_single_bit(diff)) throw DomainError("vertices not adjacent");
            return static_cast<uint32_t>(std::countr_zero(diff));
        }
        case GraphKind::Torus: {
            uint64_t a = from, b = to;
            uint32_t c = 0;
            bool found = false;
            uint32_t dir = 0;
            for (c = 0; c < spec.d; ++c) {
                const uint64_t da = a % spec.n;
                const uint64_t db = b % spec.n;
                if (da != db) {
                    if (found) throw DomainError("vertices not adjacent");
                    found = true;
                    if (db == (da + 1) % spec.n) {
                        dir = 2 * c;
                    } else if ((db + 1) % spec.n == da) {
                        dir = 2 * c + 1;
                    } else {
                        throw DomainError("vertices not adjacent");
                    }
                }
                a /= spec.n;
                b /= spec.n;
            }
            if (!found) throw DomainError("vertices not adjacent");
            return dir;
        }
        case GraphKind::Complete:
            return static_cast<uint32_t>(to < from ? to : to - 1);
        case GraphKind::CompleteProduct: {
            uint64_t a = from, b = to;
            bool found = false;
            uint32_t dir = 0;
            for (uint32_t c = 0; c < spec.d; ++c) {
                const uint64_t da = a % spec.n;
                const uint64_t db = b % spec.n;
                if (da != db) {
                    if (found) throw DomainError("vertices not adjacent");
                    found = true;
                    dir = c * (spec.n - 1) + static_cast<uint32_t>(db < da ? db : db - 1);
                }
                a /= spec.n;
                b /= spec.n;
            }
            if (!found) throw DomainError("vertices not adjacent");
            return dir;
        }
    }
    throw DomainError("unknown graph kind");
}

uint32_t reverse_direction(const GraphSpec& spec, uint64_t u, uint32_t dir, uint64_t w) {
    switch (spec.kind) {
        case GraphKind::Hypercube:
            return dir;
        case GraphKind::Torus:
            return dir ^ 1u;
        case GraphKind::Complete:
            return static_cast<uint32_t>(u < w ? u : u - 1);
        case GraphKind::CompleteProduct: {
            const uint32_t c = dir / (spec.n - 1);
            const uint64_t stride = coord_stride(spec, c);
            const uint64_t du = (u / stride) % spec.n;
            const uint64_t dw = (w / stride) % spec.n;
            return c * (spec.n - 1) + static_cast<uint32_t>(du < dw ? du : du - 1);
        }
    }
    throw DomainError("unknown graph kind");
}

EdgeId canonical_edge(const GraphSpec& spec, uint64_t u, uint64_t v) {
    const uint64_t base = u < v ? u : v;
    const uint64_t other = u < v ? v : u;
    return {base, direction_between(spec, base, other)};
}

uint64_t group_diff(const GraphSpec& spec, uint64_t x, uint64_t y) {
    switch (spec.kind) {
        case GraphKind::Hypercube:
            return x ^ y;
        case GraphKind::Complete:
            return (x + spec.n - y % spec.n) % spec.n;
        case GraphKind::Torus:
        case GraphKind::CompleteProduct: {
            uint64_t out = 0;
            uint64_t stride = 1;
            uint64_t a = x, b = y;
            for (uint32_t c = 0; c < spec.d; ++c) {
                const uint64_t da = a % spec.n;
                const uint64_t db = b % spec.n;
                out += ((da + spec.n - db) % spec.n) * stride;
                stride *= spec.n;
                a /= spec.n;
                b /= spec.n;
            }
            return out;
        }
    }
    throw DomainError("unknown graph kind");
}

namespace {

uint32_t parse_u32(std::string_view s, const char* what) {
    uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw DomainError(std::string("malformed ") + what + " in spec string");
    }
    return value;
}

}  // namespace

GraphSpec parse_spec(const std::string& text) {
    if (text.size() < 2) throw DomainError("spec string too short: " + text);
    const char kind = text[0];
    const std::string_view rest(text.data() + 1, text.size() - 1);
    const size_t caret = rest.find('^');
    if (kind == 'Q') {
        if (caret != std::string_view::npos) throw DomainError("hypercube spec takes no '^': " + text);
        return GraphSpec::hypercube(parse_u32(rest, "bit count"));
    }
    if (kind == 'T') {
        if (caret == std::string_view::npos) throw DomainError("torus spec needs T<n>^<d>: " + text);
        return GraphSpec::torus(parse_u32(rest.substr(0, caret), "side length"),
                                parse_u32(rest.substr(caret + 1), "dimension"));
    }
    if (kind == 'K') {
        if (caret == std::string_view::npos) return GraphSpec::complete(parse_u32(rest, "vertex count"));
        return GraphSpec::complete_product(parse_u32(rest.substr(0, caret), "clique size"),
                                           parse_u32(rest.substr(caret + 1), "factor count"));
    }
    throw DomainError("unknown spec string (expected Q<m>, T<n>^<d>, K<n>, K<n>^<d>): " + text);
}

std::string spec_to_string(const GraphSpec& spec) {
    switch (spec.kind) {
        case GraphKind::Hypercube:
            return "Q" + std::to_string(spec.n);
        case GraphKind::Torus:
            return "T" + std::to_string(spec.n) + "^" + std::to_string(spec.d);
        case GraphKind::Complete:
            return "K" + std::to_string(spec.n);
        case GraphKind::CompleteProduct:
            return "K" + std::to_string(spec.n) + "^" + std::to_string(spec.d);
    }
    return "?";
}

}  // namespace perclab
