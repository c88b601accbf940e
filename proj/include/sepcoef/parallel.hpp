// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sepcoef {

/// Run f(i) for i in [begin, end) across hardware threads in contiguous
/// chunks. Workers must write only to per-index slots; results are then
/// deterministic regardless of scheduling. Exceptions are captured and the
/// first one rethrown on the calling thread.
template <typename F>
void parallel_for(std::size_t begin, std::size_t end, F&& f, std::size_t min_per_thread = 64) {
    const std::size_t total = end > begin ? end - begin : 0;
    if (total == 0) return;

    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t n_threads = std::min(hw, (total + min_per_thread - 1) / min_per_thread);
    if (n_threads <= 1) {
        for (std::size_t i = begin; i < end; ++i) f(i);
        return;
    }

    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n_threads);
    const std::size_t chunk = (total + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t lo = begin + t * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, t, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace sepcoef
