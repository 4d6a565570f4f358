#pragma once

#include <cstdint>
#include <random>

namespace molcomm {

/// Random stream used throughout. Each thread owns its own instance.
using Rng = std::mt19937_64;

/// Seeds a stream for (seed, index) so that substreams are independent of the
/// number of worker threads that end up consuming them.
inline Rng make_substream(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the pair
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t a = mix(seed);
    std::uint64_t b = mix(a ^ mix(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

}  // namespace molcomm
