#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracsum {

// Number of workers to use when the caller passes 0.
inline unsigned default_workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

/*!
 * Run `fn(chunk)` for chunk in [0, chunks) on up to `workers` threads.
 *
 * Chunks are claimed dynamically, so callers must write per-chunk results
 * into preallocated slots and reduce them in chunk order afterwards.
 */
template<class F>
void for_each_chunk(std::size_t chunks, unsigned workers, F&& fn)
{
    if (workers == 0)
        workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    if (workers <= 1)
    {
        for (std::size_t c = 0; c < chunks; ++c)
            fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;)
        {
            std::size_t const c = next.fetch_add(1);
            if (c >= chunks)
                return;
            try
            {
                fn(c);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(chunks);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(body);
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace fracsum
