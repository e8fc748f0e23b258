// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace isacop {

//! Resolves a requested worker count; 0 means one per hardware thread.
unsigned resolve_threads(unsigned requested);

/*!
 * Calls `fn(block, begin, end)` for each fixed-size block of [0, count).
 *
 * Block boundaries depend only on `count` and `block_size`, never on the
 * thread count, so per-block partial results reduced in block order are
 * identical for serial and parallel runs. The first exception thrown by any
 * block is rethrown on the calling thread.
 */
void for_each_block(std::uint64_t count,
                    std::uint64_t block_size,
                    unsigned threads,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn);

inline std::uint64_t block_count(std::uint64_t count, std::uint64_t block_size)
{
    return (count + block_size - 1) / block_size;
}

}  // namespace isacop
