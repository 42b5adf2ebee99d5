#pragma once

#include <bit>
#include <cstdint>

// Counter-based randomness: every random quantity is a pure function of
// (seed, stream, counter). No generator state exists, so draws are identical
// no matter which thread or in which order they are evaluated.

namespace perclab::rng {

// Stream tags keep unrelated draw families in disjoint hash domains.
enum Stream : uint64_t {
    kEdgeStream = 0x65646765,   // edge retention uniforms
    kTrialStream = 0x7472696c,  // per-trial sub-seeds
    kRootStream = 0x726f6f74,   // uniform root choice within a trial
    kCellStream = 0x63656c6c,   // per-(cell, seed-index) sub-seeds in sweeps
    kProbeStream = 0x70726f62,  // auxiliary draws of the p_c bisection
};

// Finalizer with full avalanche (splitmix64 tail).
constexpr uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

constexpr uint64_t keyed_hash(uint64_t seed, uint64_t stream, uint64_t counter) {
    uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (stream * 0xff51afd7ed558ccdULL + 0x2545f4914f6cdd1dULL));
    h = mix64(h ^ counter);
    return h;
}

// Uniform in [0,1) with 53 random bits. Guarantees u < p is never true at
// p = 0 and always true at p = 1.
constexpr double to_unit(uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

constexpr double uniform(uint64_t seed, uint64_t stream, uint64_t counter) {
    return to_unit(keyed_hash(seed, stream, counter));
}

// Uniform integer in [0, bound) by rejection on the enclosing power of two;
// exact (no modulo bias), and a single draw when bound is a power of two.
inline uint64_t uniform_index(uint64_t seed, uint64_t stream, uint64_t bound) {
    const uint64_t mask = std::bit_ceil(bound) - 1;
    for (uint64_t attempt = 0;; ++attempt) {
        const uint64_t h = keyed_hash(seed, stream, attempt) & mask;
        if (h < bound) return h;
    }
}

}  // namespace perclab::rng
