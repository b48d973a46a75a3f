#ifndef EXPANAL_PARALLEL_HPP
#define EXPANAL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace expanal
{

/// Worker count: hardware concurrency, capped by the EXPANAL_THREADS
/// environment variable when it holds a positive integer.
std::size_t worker_count();

//
// Splits [0, n) into contiguous chunks, one per worker, and calls
// body(begin, end) for each. Chunk boundaries depend only on n and the worker
// count, and every index is visited exactly once, so callers that write to
// disjoint outputs get schedule-independent results.
//
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

} // namespace expanal

#endif
