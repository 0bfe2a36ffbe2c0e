#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace ubatch {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

// Runs fn(block, begin, end) over contiguous blocks of [0, n). Blocks are
// fixed by the thread count alone, and callers reduce per-block results in
// block order, so results do not depend on scheduling.
template <class F>
void parallel_blocks(std::int64_t n, int threads, F&& fn) {
    if (n <= 0) return;
    std::int64_t nblocks = std::min<std::int64_t>(threads, n);
    if (nblocks <= 1) {
        fn(0, std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(size_t(nblocks));
    for (std::int64_t b = 0; b < nblocks; ++b) {
        std::int64_t begin = b * n / nblocks;
        std::int64_t end = (b + 1) * n / nblocks;
        workers.emplace_back([&fn, b, begin, end] { fn(b, begin, end); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace ubatch
