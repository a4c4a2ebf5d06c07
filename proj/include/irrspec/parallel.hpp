#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace irrspec {

/// Worker cap for the parallel maps. Zero means one worker per hardware thread.
/// Results never depend on this value: every task writes only its own slot.
struct Parallelism {
    unsigned threads = 0;

    unsigned resolved(std::size_t tasks) const {
        unsigned n = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
        return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
    }
};

/// Runs fn(k) for k in [0, count). The first exception thrown by any task is rethrown.
template <class Fn>
void parallel_for(std::size_t count, Parallelism par, Fn&& fn) {
    const unsigned workers = par.resolved(count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (std::size_t k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w) {
            pool.emplace_back(body);
        }
        body();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace irrspec
