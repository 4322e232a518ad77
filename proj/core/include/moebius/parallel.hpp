#pragma once

#include <cstddef>
#include <functional>

namespace moebius {

// Worker cap for the O(n^2) kernels. Initialised from MOEBIUS_KIT_THREADS,
// otherwise the hardware concurrency.
int thread_count();
void set_thread_count(int threads);

// Calls body(i) for every i in [0, count). Rows are distributed over
// threads in contiguous blocks; callers store per-row results and reduce
// them afterwards in index order, so results do not depend on the
// thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace moebius
