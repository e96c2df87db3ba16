#pragma once

#include <cstddef>
#include <functional>

namespace fedshot {

// Runs fn(i) for every i in [0, n) on a pool of worker threads (block
// partition). Each index is processed exactly once and workers must only
// write to per-index slots; reductions stay with the caller, so results do
// not depend on scheduling. threads == 0 picks the hardware default.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

}  // namespace fedshot
