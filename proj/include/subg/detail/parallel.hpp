#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace subg::detail {

/// Worker count: an explicit request wins, then the SUBG_THREADS environment
/// variable; 0 or unset means the hardware concurrency, clamped to [1, 64].
inline int thread_budget(int requested = 0) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("SUBG_THREADS")) {
            n = std::atoi(env);
        }
    }
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
    }
    return std::clamp(n, 1, 64);
}

/// Splits [0, n) into contiguous chunks, one per worker, and runs fn(chunk
/// index, begin, end) on each. Callers merge per-chunk results in chunk
/// order, so the outcome cannot depend on the worker count.
inline void parallel_chunks(std::int64_t n, int workers,
                            const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    const int used = static_cast<int>(std::min<std::int64_t>(workers, n));
    if (used <= 1) {
        fn(0, 0, n);
        return;
    }
    const std::int64_t chunk = (n + used - 1) / used;
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (int w = 0; w < used; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([w, lo, hi, &fn] { fn(w, lo, hi); });
    }
    for (auto& t : pool) t.join();
}

} // namespace subg::detail
