#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace kac {

inline unsigned worker_count() {
    static const unsigned n = [] {
        if (const char* env = std::getenv("KAC_THREADS")) {
            const long v = std::atol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? hw : 1u;
    }();
    return n;
}

// Runs body(begin, end) over a partition of [0, n).  Each range is touched by
// exactly one thread, so writes to disjoint slots are race-free and results do
// not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n ? n : 1);
    if (workers <= 1 || n < 2) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 1; w < workers; ++w) {
        const std::size_t lo = std::min(n, w * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo < hi) threads.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    body(0, std::min(n, chunk));
    for (auto& t : threads) t.join();
}

}  // namespace kac
