#pragma once

#include <cstddef>
#include <functional>

namespace tdr {

/// Worker cap: TDR_THREADS when set to a positive integer, else the hardware
/// concurrency.
std::size_t thread_cap();

/// Runs body(i) for i in [0, count). Each index is executed exactly once; the
/// caller must write results to index-owned storage so the output does not
/// depend on scheduling. If any call throws, the exception of the lowest
/// failing index is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace tdr
