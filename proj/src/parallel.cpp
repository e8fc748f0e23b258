// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace isacop {

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_block(std::uint64_t count,
                    std::uint64_t block_size,
                    unsigned threads,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn)
{
    std::uint64_t const blocks = block_count(count, block_size);
    auto run_block = [&](std::uint64_t b) {
        std::uint64_t const begin = b * block_size;
        fn(b, begin, std::min(count, begin + block_size));
    };

    unsigned const workers = static_cast<unsigned>(
        std::min<std::uint64_t>(resolve_threads(threads), blocks));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b)
            run_block(b);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            std::uint64_t const b = next.fetch_add(1);
            if (b >= blocks)
                return;
            try {
                run_block(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(blocks);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

}  // namespace isacop
