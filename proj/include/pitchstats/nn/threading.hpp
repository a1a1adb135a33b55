#pragma once

#include <functional>

#include "pitchstats/types.hpp"

namespace pitchstats::nn {

// Worker count for the batch-parallel kernels. Work is always partitioned so
// that each output element is accumulated by exactly one worker in a fixed
// order, so results are bitwise identical for any thread count.
void set_num_threads(int n);
int num_threads();

// Runs fn over disjoint contiguous ranges covering [0, n). With one thread
// (or n < 2) the call runs inline.
void parallel_for(Index n, const std::function<void(Index, Index)>& fn);

}  // namespace pitchstats::nn
