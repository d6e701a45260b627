#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace acz {

// All randomness in the library flows through mt19937_64 plus the helpers
// below. std::uniform_real_distribution is implementation-defined, so the
// integer-to-double mapping is done by hand to keep runs bit-reproducible
// across standard libraries.

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent sub-seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform on [0, 1), 53-bit resolution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1); safe to feed into log().
inline double uniform01_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform on (-bound, +bound).
inline double uniform_pm(Rng& rng, double bound) {
    return (2.0 * uniform01_open(rng) - 1.0) * bound;
}

// Standard normal via Box-Muller on the deterministic uniforms.
inline double normal01(Rng& rng) {
    double u = uniform01_open(rng);
    double v = uniform01_open(rng);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
}

} // namespace acz
