#pragma once

#include <functional>

namespace beamspin {

/// Worker count from the BEAMSPIN_WORKERS environment variable (default 1).
int default_workers();

/// Runs fn(i) for i in [0, n) on up to `workers` threads.  Callers own any
/// output slots; use index-addressed storage so results never depend on
/// scheduling order.  The first exception thrown by any worker is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

} // namespace beamspin
