// Copyright 2026 The isacop developers.
// SPDX-License-Identifier: Apache-2.0
#include "random_stream.hpp"

namespace isacop {

namespace {

std::uint64_t splitmix64(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed)
{
    std::uint64_t x = seed;
    for (auto& word : s_)
        word = splitmix64(x);
}

RandomStream RandomStream::substream(std::uint64_t seed, std::uint64_t index)
{
    // Two rounds of mixing decorrelate neighbouring (seed, index) pairs.
    std::uint64_t x = seed;
    std::uint64_t key = splitmix64(x);
    x = key ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return RandomStream(splitmix64(x));
}

RandomStream::result_type RandomStream::operator()()
{
    std::uint64_t const result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t const t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomStream::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::normal(double stddev)
{
    return stddev * normal_(*this);
}

}  // namespace isacop
