#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace spwell {

/// Bounded worker pool over independent jobs; job i writes its own slot, so
/// results are deterministic regardless of scheduling.
template <class Fn>
inline void parallel_for(std::size_t count, Fn fn, unsigned max_workers = 0) {
    if (count == 0) return;
    unsigned workers = max_workers ? max_workers : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        threads.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : threads) t.join();
}

} // namespace spwell
