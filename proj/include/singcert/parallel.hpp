#pragma once

#include <cstddef>
#include <functional>

namespace singcert {

// Worker count: SINGCERT_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Calls body(i) for i in [0, count). Bodies must only write to slot i of
// caller-owned storage; reductions happen afterwards in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace singcert
