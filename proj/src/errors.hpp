#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace perclab {

// Invalid arguments: out-of-range vertex, non-adjacent pair, malformed spec.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Input exceeds a configured budget (vertex count, edge count, matrix size).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Monte Carlo noise prevented a decision. Carries the last valid bracket.
class PrecisionError : public std::runtime_error {
public:
    PrecisionError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

// An iteration cap was hit before the convergence criterion. Carries the best
// iterate reached.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int64_t best)
        : std::runtime_error(what), best_iterate(best) {}
    int64_t best_iterate;
};

}  // namespace perclab
