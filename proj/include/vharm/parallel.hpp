#pragma once

#include <cstddef>
#include <functional>

namespace vharm {

/// Worker count used when a caller passes 0.
unsigned default_thread_count();

/// Runs task(i) for i in [0, count). Tasks must write only to their own slot;
/// results are then independent of the thread count.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

}  // namespace vharm
