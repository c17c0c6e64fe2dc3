#pragma once

#include <cstdint>
#include <functional>

namespace gffpin {

// Process-wide worker count used by replica loops; at least 1.
void set_worker_threads(int n);
int worker_threads();

// Calls fn(i) for i = 0..n-1 on the worker pool. Each index is handled by
// exactly one call, so results written to slot i do not depend on the
// schedule. The first exception thrown by any call is rethrown.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace gffpin
