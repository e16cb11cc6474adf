#pragma once

#include <cstddef>
#include <functional>

namespace mfi {

/// Worker count used by parallel_for; 1 runs inline. Values < 1 reset to 1.
void set_thread_count(int threads) noexcept;
[[nodiscard]] int thread_count() noexcept;

/// Calls body(i) for every i in [0, count), split into contiguous chunks over
/// the configured workers. Each index is handled by exactly one worker, so
/// per-index results do not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mfi
