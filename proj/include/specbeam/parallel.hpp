#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace specbeam {

/// Worker count: explicit jobs if > 0, else SPECBEAM_JOBS, else hardware.
inline int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("SPECBEAM_JOBS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(begin, end) over [0, n) split into contiguous blocks, one per
/// worker. Blocks are fixed by (n, jobs) alone, so any per-index output
/// written into preallocated storage is deterministic.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    const int workers = std::min<std::size_t>(std::max(1, resolve_jobs(jobs)), std::max<std::size_t>(n, 1));
    if (workers <= 1 || n <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace specbeam
