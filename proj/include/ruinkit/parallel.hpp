#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace ruinkit {

/// Runs `task(block_index, begin, end)` over [0, n) split into fixed-size
/// blocks and returns the per-block results in block order.
///
/// Block boundaries depend only on (n, block_size), and callers combine the
/// returned blocks serially, so results are bit-identical for any thread
/// count. Workers claim blocks through an atomic counter.
template <typename Block, typename Task>
std::vector<Block> run_blocks(std::int64_t n, std::int64_t block_size, int threads, Task task) {
    if (n <= 0) {
        return {};
    }
    if (block_size <= 0) {
        block_size = n;
    }
    const std::int64_t n_blocks = (n + block_size - 1) / block_size;
    std::vector<Block> results(static_cast<std::size_t>(n_blocks));

    auto run_one = [&](std::int64_t bi) {
        const std::int64_t begin = bi * block_size;
        const std::int64_t end = std::min(begin + block_size, n);
        results[static_cast<std::size_t>(bi)] = task(bi, begin, end);
    };

    if (threads <= 1 || n_blocks == 1) {
        for (std::int64_t bi = 0; bi < n_blocks; ++bi) {
            run_one(bi);
        }
        return results;
    }

    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t bi = next.fetch_add(1, std::memory_order_relaxed);
            if (bi >= n_blocks) {
                return;
            }
            run_one(bi);
        }
    };
    const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, n_blocks));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    return results;
}

}  // namespace ruinkit
