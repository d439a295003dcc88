#pragma once

#include <cstddef>
#include <functional>

namespace mkr {

/// Number of worker threads: min(hardware cores, SPARSE_MKR_THREADS if set).
int max_threads();

/// Runs fn(i) for i in [0, n). Work is split into contiguous index blocks,
/// one per worker, so the assignment of indices to threads is deterministic.
/// Nested calls degrade to serial execution.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mkr
