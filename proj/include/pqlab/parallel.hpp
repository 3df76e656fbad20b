#pragma once

#include <cstddef>
#include <functional>

namespace pqlab {

/// Worker count used when a caller passes 0: hardware concurrency, at least 1.
int default_workers();

/// Runs body(0..n-1) on at most `workers` threads (0 = default_workers()).
/// Calls made from inside a worker run inline, so nesting never multiplies
/// the thread count. Results must be written by index to stay deterministic.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace pqlab
