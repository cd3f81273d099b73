#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hgm {

/// Worker count for data-parallel loops: HGM_THREADS if set and positive,
/// otherwise the hardware concurrency (at least 1).
inline int thread_count() {
    if (const char* env = std::getenv("HGM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs body(i) for i in [0, count). Work is split into contiguous chunks,
/// one per worker; each index is processed exactly once, so any
/// per-index output slots make the result independent of the worker
/// count. Reductions must be performed by the caller over per-index
/// results in index order.
inline void parallel_for(int count, const std::function<void(int)>& body) {
    const int workers = std::min(thread_count(), count > 0 ? count : 1);
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (int i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace hgm
