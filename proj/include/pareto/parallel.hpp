#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pareto {

// Thread count used when callers pass 0: PARETO_TRACE_THREADS, else hardware.
unsigned default_thread_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; fn must only write to per-index slots, which makes
// the result independent of the thread count. The first exception thrown by
// any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    if (threads == 0)
        threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            // Strided assignment keeps per-worker load balanced for
            // index-correlated costs.
            for (std::size_t i = w; i < n; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace pareto
