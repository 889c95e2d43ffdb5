#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace splatcolor {

inline int effective_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs f(item, worker) over [0, count) with a static contiguous partition:
// worker w owns one fixed range, so a given (count, threads) pair always maps
// items to the same worker. Output written per item stays deterministic;
// per-worker accumulators must be merged by the caller in worker order.
template <class F>
void parallel_for_static(int count, int threads, F&& f) {
    threads = std::min(effective_threads(threads), std::max(count, 1));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) f(i, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        int begin = static_cast<int>(static_cast<long long>(count) * w / threads);
        int end = static_cast<int>(static_cast<long long>(count) * (w + 1) / threads);
        pool.emplace_back([begin, end, w, &f] {
            for (int i = begin; i < end; ++i) f(i, w);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace splatcolor
