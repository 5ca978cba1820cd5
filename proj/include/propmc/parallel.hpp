#pragma once

#include <cstddef>
#include <functional>

namespace propmc {

// Number of workers to use: 0 requests hardware concurrency.
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on `threads` workers.  Indices are handed out
// via a shared counter; each body invocation must write only state owned by
// its index, which makes the result independent of scheduling.  The first
// exception (by lowest index) is rethrown on the calling thread after all
// workers have joined.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace propmc
