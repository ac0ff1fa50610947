#pragma once

#include <functional>

namespace moderr {

/// Process-wide cap on worker threads (set by the CLI --threads flag).
/// 0 means "use hardware concurrency".
void set_thread_cap(int threads);
int thread_cap();

/// Runs fn(i) for i in [0, n) on up to `threads` workers with a static
/// contiguous partition. Results must be written to disjoint slots, which
/// makes the output independent of the worker count. The first exception
/// thrown by any worker is rethrown on the caller.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Same, using the process-wide cap.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace moderr
