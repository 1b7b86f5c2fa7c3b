#pragma once

#include <functional>

namespace roofkit {

// Runs fn(i) for i in [0, count) on up to `threads` workers pulling from a
// shared atomic counter. Results must be written to per-index slots; the
// caller assembles them in order afterwards, so output is independent of the
// thread count.
void parallel_for(int64_t count, int threads, const std::function<void(int64_t)>& fn);

// --threads flag fallback: ROOFKIT_THREADS env var, else 1.
int default_thread_count();

}  // namespace roofkit
