#pragma once

#include <cstdint>
#include <functional>

namespace qdem {

// 0 means all available hardware threads.
int resolve_threads(int requested);

// Splits [0, count) into contiguous chunks and runs fn(worker, begin, end) for
// each on its own thread. Results must be combined by the caller in an
// order-independent way.
void parallel_chunks(std::int64_t count, int threads,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn);

}  // namespace qdem
