#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace specmix {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive hash of a seed with a list of coordinates.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64(base);
    for (auto p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

// std::uniform_real_distribution is implementation-defined; this keeps the
// stream identical across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    // Lemire-free rejection; bound is small in all call sites.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

}  // namespace specmix
