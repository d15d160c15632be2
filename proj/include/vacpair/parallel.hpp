#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vacpair
{
/*!
 * Run body(i) for i in [0, count) on up to \c threads workers.
 *
 * Indices are dealt round-robin so each index is owned by exactly one worker;
 * the body must only write to storage owned by its index. The first exception
 * thrown by any worker is rethrown on the calling thread.
 */
template<class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
    {
        workers.emplace_back([&, w] {
            try
            {
                for (std::size_t i = w; i < count; i += threads)
                    body(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    for (auto& t : workers)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

}  // namespace vacpair
