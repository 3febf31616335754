#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mmlreg::detail
{

inline unsigned resolve_workers(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Calls fn(i) for i in [0, count) on up to @p workers threads. Each index is
 * processed exactly once; callers write results into slot i so the outcome
 * does not depend on scheduling. The first exception thrown is rethrown.
 */
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn)
{
    workers = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), count));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        next = count;
                    }
                }
            });
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace mmlreg::detail
