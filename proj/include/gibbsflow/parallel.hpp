#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gibbsflow {

/// Worker count: GIBBSFLOW_THREADS when set, else hardware concurrency.
unsigned default_threads();
void set_default_threads(unsigned n);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots so reductions stay order-independent.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = default_threads();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned k = static_cast<unsigned>(std::min<std::size_t>(threads, n));
        pool.reserve(k);
        for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace gibbsflow
