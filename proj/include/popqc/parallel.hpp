#pragma once

#include <cstddef>
#include <functional>

namespace popqc {

/// Parallel map over the index range [0, n), the only parallelism
/// primitive used by this project.
///
/// `body(begin, end)` is invoked over disjoint chunks of roughly `grain`
/// indices; chunks are handed out dynamically so uneven work self-balances.
/// The calling thread participates, so `threads == 1` runs inline with no
/// spawning. Blocks until every chunk is done; the first exception raised
/// by any chunk is rethrown.
void parallel_for(unsigned threads, std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Hardware concurrency, at least 1.
unsigned default_thread_count();

}  // namespace popqc
