#pragma once

#include <cstddef>
#include <functional>

namespace roughldp {

/// Process-wide worker count used by parallel_for (default: hardware concurrency).
void set_thread_count(std::size_t n);
[[nodiscard]] std::size_t thread_count();

/// Runs body(i) for i in [0, count). Work is split into contiguous chunks;
/// callers write only to slot i, so results do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace roughldp
