#pragma once

#include <cstddef>
#include <functional>

namespace spinboson {

/// Number of worker threads: SPINBOSON_THREADS when set, otherwise the
/// hardware concurrency, clamped to [1, 16].
int thread_count();

/// Runs fn(i) for i in [0, count) on the worker pool. Callers must write
/// results into index-addressed slots; any reduction happens afterwards in
/// index order, which keeps outputs independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace spinboson
