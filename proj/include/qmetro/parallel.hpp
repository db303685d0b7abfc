#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace qmetro {

inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Static contiguous partition of [0, n) across workers. Each index is
// processed exactly once; results must be written to per-index slots so the
// outcome is independent of the worker count.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    workers = resolve_workers(workers);
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        const std::size_t end = std::min(begin + chunk, n);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end, w] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace qmetro
