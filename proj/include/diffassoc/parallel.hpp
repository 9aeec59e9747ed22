#pragma once

#include <cstddef>
#include <functional>

namespace diffassoc {

/// Worker count for a request of `requested` threads (0 = auto). The
/// DIFFASSOC_THREADS environment variable, when set to a positive value,
/// caps the result.
unsigned resolve_threads(unsigned requested);

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// The first exception thrown by any call is rethrown after all workers
/// have stopped. Callers write results into per-index slots so the outcome
/// does not depend on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace diffassoc
