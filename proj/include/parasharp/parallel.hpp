#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace parasharp {

/// Worker cap from PARASHARP_THREADS (0 or unset = hardware concurrency).
inline int worker_count() {
    int n = 0;
    if (const char* env = std::getenv("PARASHARP_THREADS")) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, n);
}

/// Static partition of [0, count); each index is processed by exactly one worker,
/// so per-index results never depend on the worker count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace parasharp
