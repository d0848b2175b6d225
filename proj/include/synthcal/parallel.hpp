#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace synthcal {

// Runs body(i) for i in [0, n). Work is split into contiguous chunks, one per
// thread; results must be written to index-addressed storage so the outcome
// is independent of the schedule. The first exception thrown by any worker
// is rethrown on the calling thread after all workers join.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned t = threads;
    if (static_cast<std::size_t>(t) > n) t = static_cast<unsigned>(n);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        std::size_t begin = n * w / t;
        std::size_t end = n * (w + 1) / t;
        pool.emplace_back([begin, end, &body, &error, &error_mutex] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace synthcal
