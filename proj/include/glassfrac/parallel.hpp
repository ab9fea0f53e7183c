#pragma once

#include <cstddef>
#include <functional>

namespace glassfrac {

/// Worker count from GLASSFRAC_THREADS, else the hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads in contiguous chunks.
/// The body must only write to storage owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace glassfrac
