#pragma once

// Seeded randomness helpers.  std::mt19937_64 output is pinned by the
// standard, but the <random> distributions are not, so bounded draws and
// unit doubles are derived here directly from raw engine output.  Same
// seed, same platform-independent stream.

#include <cstdint>
#include <random>

namespace cpmine {

using rng_engine = std::mt19937_64;

// Uniform integer in [0, n) by rejection sampling, bias-free.
inline std::uint64_t bounded(rng_engine& rng, std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(rng_engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cpmine
