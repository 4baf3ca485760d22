#pragma once

#include <cstddef>
#include <functional>

namespace besovop {

/// Worker count: BESOVOP_THREADS if set (>= 1), else hardware concurrency.
std::size_t thread_budget() noexcept;

/// Runs body(i) for i in [0, count) on up to thread_budget() threads.
/// Callers write results into slot i, so output order never depends on the
/// schedule. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace besovop
