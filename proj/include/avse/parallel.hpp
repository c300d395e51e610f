// Minimal index-parallel loop for independent batch items.
#pragma once

#include <cstddef>
#include <functional>

namespace avse {

// Runs fn(0..count-1) on up to `threads` threads (the caller included). If any
// call throws, the exception of the lowest failing index is rethrown after
// all work finishes, so error reporting does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace avse
