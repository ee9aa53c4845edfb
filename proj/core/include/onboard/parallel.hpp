#pragma once

#include <cstddef>
#include <functional>

namespace onboard {

/// Worker count: ONBOARD_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Calls made from inside a running
/// parallel_for execute inline. The first exception thrown by any body is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace onboard
