#pragma once

#include <cstddef>
#include <functional>

namespace toalab {

// Worker count used by parallel_for; 0 selects the hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Calls body(i) for i in [0, n). Each index is visited exactly once; callers write results into
// per-index slots so the outcome does not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace toalab
