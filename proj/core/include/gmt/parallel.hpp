#pragma once

#include <cstddef>
#include <functional>

namespace gmt {

/// Worker count: GMT_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Callers
/// write results into slot i, so the outcome never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gmt
