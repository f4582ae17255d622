#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace featherlink {

/// Worker count for evaluation campaigns: hardware concurrency, capped by the
/// FEATHERLINK_THREADS environment variable when set.
inline int eval_thread_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("FEATHERLINK_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

/// Runs fn(i) for i in [0, count) across eval threads in contiguous chunks.
/// Callers must make fn(i) independent of execution order (write to slot i,
/// or accumulate per-index results) so outcomes do not depend on the thread
/// count.
inline void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
    const int threads = std::min<std::int64_t>(eval_thread_count(), count > 0 ? count : 1);
    if (threads <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const std::int64_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min<std::int64_t>(lo + chunk, count);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace featherlink
