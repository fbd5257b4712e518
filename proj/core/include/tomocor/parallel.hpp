#pragma once

#include <cstddef>
#include <functional>

namespace tomocor {

/// Worker count from TOMO_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Calls body(begin, end) on contiguous chunks of [0, count), possibly from
/// several threads, and waits for all of them.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace tomocor
