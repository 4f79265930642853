#pragma once

// Minimal fork-join helper.  Thread count honors the MAXNS_THREADS
// environment variable (capped by the hardware), defaulting to the hardware
// concurrency.

#include <functional>

namespace maxns {

int thread_budget();

// Applies fn to every index in [begin, end), splitting contiguous chunks
// across the thread budget.  Exceptions from workers are rethrown on the
// caller thread.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace maxns
