#pragma once

#include <functional>

namespace kreinlab {

/// Runs body(i) for i in [0, count) on up to `jobs` threads (jobs <= 0 means
/// one per hardware thread). Each index runs exactly once; callers write into
/// preallocated slots, so results do not depend on scheduling. The first
/// exception thrown by any body is rethrown after all threads join.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

/// Default job count: KREINLAB_JOBS if set and positive, else the hardware
/// thread count.
int default_jobs();

}  // namespace kreinlab
