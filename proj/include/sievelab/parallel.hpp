#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sievelab {

// Runs fn(lo, hi) over half-open chunks of [begin, end). The chunk grid is a
// function of (begin, end, chunk) only, never of the thread count, so any
// computation whose chunks write disjoint state is reproducible across
// thread counts.
inline void parallel_for(uint64_t begin, uint64_t end, uint64_t chunk, int threads,
                         const std::function<void(uint64_t, uint64_t)>& fn) {
    if (begin >= end) return;
    if (chunk == 0) chunk = 1;
    const uint64_t n_chunks = (end - begin + chunk - 1) / chunk;
    int workers = std::max(1, threads);
    workers = static_cast<int>(std::min<uint64_t>(workers, n_chunks));
    if (workers == 1) {
        for (uint64_t c = 0; c < n_chunks; ++c) {
            const uint64_t lo = begin + c * chunk;
            fn(lo, std::min(end, lo + chunk));
        }
        return;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
                if (c >= n_chunks || failed.load(std::memory_order_relaxed)) return;
                const uint64_t lo = begin + c * chunk;
                try {
                    fn(lo, std::min(end, lo + chunk));
                } catch (...) {
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error("parallel_for: worker failed");
}

}  // namespace sievelab
