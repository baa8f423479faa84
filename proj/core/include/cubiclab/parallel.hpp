#pragma once

#include <cstddef>
#include <functional>

namespace cubiclab {

/// Number of worker threads used when a caller passes 0.
unsigned default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers using static
/// contiguous chunks. Callers write into pre-sized slots indexed by i, so the
/// result is independent of scheduling.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace cubiclab
