#pragma once

#include <cstddef>
#include <functional>

namespace cfmgml {

// Runs chunk_fn over contiguous index ranges [begin, end) covering [0, count),
// on up to `threads` workers. Results must be written to disjoint output
// slots; under that contract the outcome is identical for any thread count.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& chunk_fn);

}  // namespace cfmgml
