#pragma once

#include <cstddef>
#include <functional>

namespace quasilat {

/// Worker count: QUASILAT_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
std::size_t thread_count();

/// Calls body(i) for every i in [0, n). Each index is visited exactly once;
/// callers write results by index so output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace quasilat
