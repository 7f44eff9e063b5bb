#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace osc {

inline int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(chunk_index, begin, count) for every fixed-size chunk of [0, total).
/// Chunk boundaries depend only on (total, chunk_size), never on the thread
/// count, so per-chunk partial results merged in chunk order are identical no
/// matter how the work was scheduled.
template <class Fn>
void for_each_chunk(std::int64_t total, std::int64_t chunk_size, int threads, Fn&& fn) {
    if (total <= 0) return;
    const std::int64_t n_chunks = (total + chunk_size - 1) / chunk_size;
    const int workers = std::min<std::int64_t>(effective_threads(threads), n_chunks);
    auto run_chunk = [&](std::int64_t c) {
        const std::int64_t begin = c * chunk_size;
        const std::int64_t count = std::min(chunk_size, total - begin);
        fn(c, begin, count);
    };
    if (workers <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                run_chunk(c);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace osc
