#pragma once
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace sibling {

// Resolves a requested thread count: n > 0 is taken as-is, otherwise the
// SIBLING_THREADS environment variable, otherwise hardware concurrency.
int resolve_threads(int requested);

// Runs f(chunk_index, begin, end) over [0, n) split into fixed chunks of
// `grain` items. Chunk boundaries depend only on (n, grain), never on the
// thread count, so callers that combine per-chunk results in chunk order get
// schedule-independent output.
template <class F>
void parallel_chunks(std::size_t n, std::size_t grain, int threads, F&& f) {
    if (n == 0) return;
    if (grain == 0) grain = 1;
    const std::size_t chunks = (n + grain - 1) / grain;
    threads = resolve_threads(threads);
    if (threads <= 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            f(c, c * grain, std::min(n, (c + 1) * grain));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            f(c, c * grain, std::min(n, (c + 1) * grain));
        }
    };
    std::vector<std::thread> pool;
    const std::size_t nt = std::min<std::size_t>(threads, chunks);
    pool.reserve(nt - 1);
    for (std::size_t i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace sibling
