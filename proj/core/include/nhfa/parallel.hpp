#pragma once

#include <functional>

namespace nhfa {

/// Thread cap: min(hardware concurrency, NHCALC_THREADS). NHCALC_THREADS=1
/// forces serial execution.
int max_threads();

/// Runs body(i) for i in [begin, end) across up to max_threads() workers.
/// Indices are statically chunked; callers write results per-index, so
/// downstream reductions do not depend on the thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace nhfa
