#pragma once

#include <cstddef>
#include <functional>

namespace lame {

// Worker count: explicit value if > 0, else LAME_EDGE_JOBS, else hardware.
int resolve_jobs(int requested = 0);

// Calls fn(i) for i in [0, n) on up to `jobs` threads with static
// interleaved chunks. Each index must write only its own output slot;
// reductions are done by the caller in index order. The first exception
// thrown by any worker is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace lame
