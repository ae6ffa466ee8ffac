#pragma once

#include <cstddef>
#include <functional>

namespace curvlab {

/// Worker threads to use: hardware concurrency, capped by CURVLAB_THREADS
/// when that is set to a positive integer.
std::size_t worker_count();

/// Runs body(i) for i in [0, count). Each index writes only its own output
/// slot, so results do not depend on scheduling. The exception thrown for the
/// lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace curvlab
