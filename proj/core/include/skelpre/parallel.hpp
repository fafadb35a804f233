#pragma once

#include <cstddef>
#include <functional>

namespace skelpre {

// Worker count: hardware concurrency, capped by SKELPRE_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n) over contiguous chunks. Each index is visited
// exactly once; callers write results into per-index slots so the outcome
// does not depend on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace skelpre
