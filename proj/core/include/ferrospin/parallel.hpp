#pragma once

#include <cstddef>
#include <functional>

namespace ferrospin {

// FERROSPIN_THREADS if set and positive, else the hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, count). Results must be written to per-index
// slots so output does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace ferrospin
