#pragma once

#include <cstdint>
#include <functional>

namespace liftpde {

// Worker count: LIFTPDE_THREADS if set (clamped to [1, 256]), else
// hardware_concurrency. Read once per process.
int worker_count();

// Runs fn(begin, end) over a partition of [0, n) on the worker pool and blocks
// until all chunks finish. Chunks are disjoint, so callers that only write
// through disjoint indices and combine results with order-independent
// reductions (max, per-index stores) get bit-identical output for any worker
// count. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace liftpde
