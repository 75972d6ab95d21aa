#include "scalinglab/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace slab {

int default_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SCALINGLAB_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(std::int64_t n, int workers, int n_chunks,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    if (n_chunks > n) n_chunks = static_cast<int>(n);
    auto chunk_bounds = [&](int c) {
        const std::int64_t lo = n * c / n_chunks;
        const std::int64_t hi = n * (c + 1) / n_chunks;
        return std::pair<std::int64_t, std::int64_t>{lo, hi};
    };
    workers = default_workers(workers);
    if (workers <= 1 || n_chunks <= 1) {
        for (int c = 0; c < n_chunks; ++c) {
            auto [lo, hi] = chunk_bounds(c);
            fn(c, lo, hi);
        }
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= n_chunks) return;
            auto [lo, hi] = chunk_bounds(c);
            fn(c, lo, hi);
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min(workers, n_chunks);
    pool.reserve(nt - 1);
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace slab
