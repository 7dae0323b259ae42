#pragma once

// Row-range parallel loop. Work is split into one contiguous chunk per
// worker and every chunk writes disjoint output, so results are identical
// for any worker count.

#include <algorithm>
#include <thread>
#include <vector>

namespace mbflow {

inline unsigned effective_jobs(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

template <class Fn>
void parallel_for_rows(int begin, int end, unsigned jobs, Fn&& fn) {
    jobs = effective_jobs(jobs);
    const int count = end - begin;
    if (count <= 0) return;
    const int workers = static_cast<int>(std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (count + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        int lo = begin + t * chunk;
        int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace mbflow
