#pragma once

#include <cstdint>
#include <functional>

namespace perclab::par {

// Global worker count. 0 restores the hardware default. Thread-safe.
void set_threads(unsigned n);
unsigned threads();

// Runs fn(chunk_index, begin, end) over [0, count) split into fixed chunks of
// `chunk` items. The decomposition depends only on (count, chunk), never on
// the worker count, so callers that write per-chunk slots and reduce them in
// chunk order get byte-identical results at any thread setting.
void for_chunks(uint64_t count, uint64_t chunk,
                const std::function<void(uint64_t, uint64_t, uint64_t)>& fn);

}  // namespace perclab::par
