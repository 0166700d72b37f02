#ifndef WIRESIM_THREADING_HPP
#define WIRESIM_THREADING_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace wiresim {

/// Runs fn(begin, end, worker) over contiguous chunks of [0, count). With
/// workers <= 1 this is a plain loop on the calling thread. Chunk
/// boundaries depend only on (count, workers), never on scheduling.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t, std::size_t, int)>& fn)
{
    if (count == 0) return;
    const std::size_t nw = workers <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    if (nw == 1) {
        fn(0, count, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nw);
    const std::size_t chunk = (count + nw - 1) / nw;
    for (std::size_t w = 0; w < nw; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                if (begin < end) fn(begin, end, static_cast<int>(w));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Runs fn(index, worker) for every index in [0, count), handing out one
/// index per grab (per-task dispatch). Execution order is nondeterministic;
/// callers must make per-index work order-independent.
inline void parallel_tasks(std::size_t count, int workers,
                           const std::function<void(std::size_t, int)>& fn)
{
    if (count == 0) return;
    const std::size_t nw = workers <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    if (nw == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nw);
    for (std::size_t w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                    if (i >= count) break;
                    fn(i, static_cast<int>(w));
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace wiresim

#endif
