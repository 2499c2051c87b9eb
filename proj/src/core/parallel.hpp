#pragma once

#include <functional>

namespace ogtt {

// Run fn(i) for every i in [begin, end).  With workers > 1 the indices are
// handed out through a shared counter; the first exception thrown by any
// worker is rethrown after all threads have joined.  Work must be safe to
// run out of order (each index independent of the others).
void parallel_for_indexed(int begin, int end, int workers,
                          const std::function<void(int)>& fn);

}  // namespace ogtt
