#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dcsvm {

/// Runs `body(index)` for every index in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; the first exception thrown is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body &&body) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        for (std::size_t index = 0; index < count; ++index) {
            body(index);
        }
        return;
    }
    std::atomic<std::size_t> next{ 0 };
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t index = next++; index < count; index = next++) {
                try {
                    body(index);
                } catch (...) {
                    const std::lock_guard lock{ failure_mutex };
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    workers.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace dcsvm
