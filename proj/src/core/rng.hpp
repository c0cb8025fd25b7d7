#pragma once

#include <cmath>
#include <cstdint>

namespace srm {

// SplitMix64 mixing function. Used as a counter-based generator so each
// pixel's noise depends only on (seed, pixel index), never on evaluation
// order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Standard normal sample for a (seed, index) pair: SplitMix64 keyed by the
// index, Box-Muller on the two resulting uniforms. u1 is mapped into (0, 1]
// so the log never sees zero.
inline double gaussian_sample(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(index + 1));
    const std::uint64_t b = splitmix64(a);
    const double u1 = 1.0 - uniform_from_bits(a);
    const double u2 = uniform_from_bits(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Derives an independent stream seed, e.g. one per frame of a sequence.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index ^ 0xA3C59AC2F0FE04B1ull));
}

} // namespace srm
