#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace blade {

/// Global worker count for parallel_for (CLI --threads). 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Parallel loop over [begin, end). Each index writes only to its own output slot,
/// so the result is independent of the thread count and of chunk scheduling.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& fn);

} // namespace blade
