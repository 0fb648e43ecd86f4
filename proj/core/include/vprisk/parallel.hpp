#pragma once

#include <cstddef>
#include <functional>

namespace vprisk {

/// Number of workers to use when the caller asks for 0 ("all cores").
unsigned default_thread_count() noexcept;

/// Calls fn(k) for k in [0, count) on up to `threads` workers. Work items are
/// claimed in index order; results must be written to caller-owned slots indexed
/// by k. The first exception thrown by fn is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace vprisk
