#pragma once

#include <cstddef>
#include <functional>

namespace stlasso {

/// Runs job(i) for i in [0, count) on up to `threads` worker threads. Jobs must write only
/// to their own slot; results are therefore independent of scheduling. The first exception
/// thrown by a job is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job);

}  // namespace stlasso
