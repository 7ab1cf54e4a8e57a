#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace dv {

// Worker count: DV_THREADS if set to a positive integer, otherwise all cores.
unsigned thread_count();

// Calls body(i) for i in [0, n) on up to thread_count() threads. Each index is
// handled exactly once, so writing to slot i keeps results independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Pairwise (cascade) summation with a fixed reduction tree.
double pairwise_sum(std::span<const double> xs);

}  // namespace dv
