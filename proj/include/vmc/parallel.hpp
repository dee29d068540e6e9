#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace vmc {

// Chunked replicate loop. Each body call is independent (replicate-indexed
// RNG streams), so results land in caller-owned slots and any reduction done
// afterwards is order-fixed regardless of scheduling.
template <typename Body>
void parallel_replicates(std::size_t count, const Body& body, unsigned threads = 0) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || count < 2 * threads) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = lo + chunk < count ? lo + chunk : count;
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace vmc
