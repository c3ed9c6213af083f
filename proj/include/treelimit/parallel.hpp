#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace treelimit {

// Worker cap from TREELIMIT_THREADS (>= 1); defaults to the hardware count
// clamped to 8.
inline int worker_count() {
    if (const char* env = std::getenv("TREELIMIT_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return static_cast<int>(hw > 8 ? 8 : hw);
}

// Runs fn(chunk_index, begin, end) over a fixed 16-way split of [0, n).
// Chunk boundaries do not depend on the worker count, so chunkwise
// reductions combine in a deterministic order.
inline void parallel_chunks(long long n, const std::function<void(int, long long, long long)>& fn) {
    constexpr int kChunks = 16;
    if (n <= 0) return;
    int workers = worker_count();
    if (workers <= 1 || n < 4096) {
        for (int c = 0; c < kChunks; ++c) {
            long long begin = n * c / kChunks, end = n * (c + 1) / kChunks;
            if (begin < end) fn(c, begin, end);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int c = w; c < kChunks; c += workers) {
                long long begin = n * c / kChunks, end = n * (c + 1) / kChunks;
                if (begin < end) fn(c, begin, end);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace treelimit
