#pragma once

#include <cstddef>
#include <functional>

namespace snippet_smc {

/// Worker-thread cap: min(hardware_concurrency, SNIPPET_SMC_THREADS if set).
std::size_t worker_thread_count();

/// Runs fn(i) for i in [0, n), chunked over worker threads. Work items must
/// be independent; all cross-item reductions stay with the caller so results
/// do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace snippet_smc
