#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace funcbell {

// Worker cap shared by every parallel loop in the library. Results never
// depend on this value: work is split into fixed-size blocks and partial
// results are combined in block order.
void set_max_threads(unsigned n);
unsigned max_threads();

inline constexpr std::size_t kBlockSize = 4096;

// Calls body(begin, end) for consecutive blocks of kBlockSize indices in
// [0, n). Blocks may run concurrently; body must only write to disjoint state.
void parallel_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                     std::size_t block_size = kBlockSize);

// Pairwise summation with a fixed recursion tree, so the result only depends
// on the input order.
double pairwise_sum(std::span<const double> values);

}  // namespace funcbell
