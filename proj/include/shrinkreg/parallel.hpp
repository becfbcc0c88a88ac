#pragma once

#include <cstddef>
#include <functional>

namespace shrinkreg {

/// 0 → hardware concurrency (at least 1).
int resolve_workers(int requested);

/// Runs body(i) for i in [0, count) on `workers` threads. Each index is
/// processed exactly once; callers write results into per-index slots so
/// the outcome does not depend on scheduling. The first exception thrown by
/// any body is rethrown on the calling thread.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace shrinkreg
