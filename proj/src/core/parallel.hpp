#pragma once

#include <cstdint>
#include <functional>

namespace vcnn {

// Worker cap for all internal data parallelism. Results are bit-identical for
// any thread count: work is split into disjoint index ranges and every output
// cell is reduced sequentially by exactly one worker.
void set_threads(int n);
int threads();

// Runs fn(begin, end) over a static partition of [0, n).
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

}  // namespace vcnn
