#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace contrack {

/// Worker cap from CONTOUR_TRACK_THREADS (0 or unset = hardware concurrency).
inline int worker_count() {
    static const int cached = [] {
        int n = 0;
        if (const char* env = std::getenv("CONTOUR_TRACK_THREADS")) n = std::atoi(env);
        if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
        return n > 0 ? n : 1;
    }();
    return cached;
}

/// Runs fn(y_begin, y_end) over disjoint row ranges. Callers write disjoint
/// outputs per row, so the partitioning never changes results.
template <class F>
inline void parallel_rows(int height, F&& fn) {
    const int workers = std::min(worker_count(), height);
    if (workers <= 1 || height < 64) {
        fn(0, height);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (height + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int y0 = w * chunk;
        const int y1 = std::min(height, y0 + chunk);
        if (y0 >= y1) break;
        pool.emplace_back([&fn, y0, y1] { fn(y0, y1); });
    }
    for (auto& t : pool) t.join();
}

} // namespace contrack
