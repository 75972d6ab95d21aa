#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace slab {

/// Number of workers to use: explicit argument > SCALINGLAB_WORKERS env > hardware.
int default_workers(int requested = 0);

/// Runs fn(chunk_index, begin, end) over [0, n) split into a FIXED number of
/// chunks that does not depend on the worker count, so per-chunk results can
/// be reduced in chunk order and stay bit-identical for any thread count.
void parallel_chunks(std::int64_t n, int workers, int n_chunks,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn);

constexpr int kFixedChunks = 64;

}  // namespace slab
