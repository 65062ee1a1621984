#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace fragcoal {

// Runs fn(i) for i in [0, n) on `workers` threads with a static stripe
// partition. Callers must write results into per-index slots; combined with
// per-index random substreams this makes output independent of the worker
// count and of scheduling order.
template <typename Fn>
void parallel_for(std::uint64_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([w, n, workers, &fn] {
            for (std::uint64_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace fragcoal
