#pragma once

#include <functional>

namespace ioncavity {

// Worker count for data-parallel sweeps: hardware concurrency, capped by the
// IONCAVITY_THREADS environment variable when set.
int sweep_thread_count();

// Runs fn(0..count-1) across workers. Results must be written to per-index
// slots so the outcome is identical for any thread count. The first
// exception thrown by any index is rethrown after all workers join.
void parallel_for(int count, const std::function<void(int)>& fn);

} // namespace ioncavity
