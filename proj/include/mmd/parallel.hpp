#pragma once
// Deterministic fork-join over an index range. Chunks are contiguous and
// their count depends only on `threads`, so per-chunk results can be merged
// in chunk order to reproduce the sequential answer exactly.

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace mmd {

inline void parallel_chunks(std::int64_t n, int threads,
                            const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
    if (n <= 0) return;
    if (threads < 1) threads = 1;
    int chunks = static_cast<int>(std::min<std::int64_t>(threads, n));
    if (chunks == 1) {
        fn(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (int c = 0; c < chunks; ++c) {
        std::int64_t begin = n * c / chunks;
        std::int64_t end = n * (c + 1) / chunks;
        pool.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mmd
