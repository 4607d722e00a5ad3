#pragma once

#include <functional>

namespace shrinkflow {

/// Worker cap: SHRINKFLOW_THREADS env var, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on the worker pool. Callers must write results
/// into per-index slots; with that discipline outputs are identical for any
/// worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace shrinkflow
