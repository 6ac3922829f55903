#pragma once

#include <cstddef>
#include <functional>

namespace gsi {

/// GSI_THREADS if set (>= 1), otherwise the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads.  Each index
/// is visited exactly once; callers write only to slots owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gsi
