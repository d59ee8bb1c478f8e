#pragma once

#include <cstddef>
#include <functional>

namespace roomsim {

// Worker count: ROOMSIM_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Splits [0, n) into contiguous chunks and runs body(begin, end) on up to
// thread_count() threads. Each index is visited exactly once; callers write to
// disjoint outputs so results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace roomsim
