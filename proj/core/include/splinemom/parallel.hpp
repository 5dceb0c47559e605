#pragma once

#include <cstddef>
#include <functional>

namespace splinemom {

/// Worker count for parallel loops. Respects the SPLINE_MOM_THREADS
/// environment variable as an upper cap; defaults to the hardware count.
int worker_count();

/// Runs fn(chunk_index, begin, end) over [0, n) split into static chunks,
/// one chunk per worker. Chunk boundaries depend only on n and the worker
/// count, and callers merge per-chunk results in chunk order, so outputs
/// stay deterministic.
void parallel_chunks(std::size_t n,
                     const std::function<void(int, std::size_t, std::size_t)>& fn);

} // namespace splinemom
