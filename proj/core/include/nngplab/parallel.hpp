#pragma once

#include <cstddef>
#include <functional>

namespace nngp {

// Worker count: set_worker_count() if called, else NNGPLAB_THREADS, else 1.
int worker_count();
void set_worker_count(int workers);

// Runs body(i) for i in [0, count) on the worker pool. Indices are handed out
// dynamically, so body must only write to per-index state. The first
// exception thrown by any task is rethrown after all workers join. Nested
// calls from inside a task run serially on the calling worker.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nngp
