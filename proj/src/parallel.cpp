#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace perclab::par {

namespace {

std::atomic<unsigned> g_threads{0};

unsigned hardware_default() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

void set_threads(unsigned n) { g_threads.store(n); }

unsigned threads() {
    const unsigned n = g_threads.load();
    return n == 0 ? hardware_default() : n;
}

void for_chunks(uint64_t count, uint64_t chunk,
                const std::function<void(uint64_t, uint64_t, uint64_t)>& fn) {
    if (count == 0) return;
    if (chunk == 0) chunk = 1;
    const uint64_t nchunks = (count + chunk - 1) / chunk;
    const uint64_t nworkers = std::min<uint64_t>(threads(), nchunks);

    if (nworkers <= 1) {
        for (uint64_t c = 0; c < nchunks; ++c) {
            fn(c, c * chunk, std::min(count, (c + 1) * chunk));
        }
        return;
    }

    std::atomic<uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const uint64_t c = next.fetch_add(1);
            if (c >= nchunks || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(c, c * chunk, std::min(count, (c + 1) * chunk));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(nworkers - 1);
    for (uint64_t i = 1; i < nworkers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace perclab::par
