#include <expanal/parallel.hpp>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace expanal
{

std::size_t worker_count()
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EXPANAL_THREADS"))
    {
        try
        {
            const long cap = std::stol(env);
            if (cap > 0)
            {
                n = std::min(n, static_cast<std::size_t>(cap));
            }
        }
        catch (const std::exception&)
        {
            // unparsable value: ignore the cap
        }
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body)
{
    if (n == 0)
    {
        return;
    }
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1)
    {
        body(0, n);
        return;
    }

    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
        {
            const std::size_t begin = w * chunk;
            const std::size_t end   = std::min(n, begin + chunk);
            if (begin >= end)
            {
                break;
            }
            threads.emplace_back([&, w, begin, end] {
                try
                {
                    body(begin, end);
                }
                catch (...)
                {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }
}

} // namespace expanal
