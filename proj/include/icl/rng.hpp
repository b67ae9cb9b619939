#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace icl::rng {

// std::mt19937_64 has a standard-mandated output sequence, so everything
// built on it here is reproducible across platforms and standard libraries.
// The distribution helpers avoid <random> distributions on purpose: their
// output is implementation-defined.
using Engine = std::mt19937_64;

/// Integer in [0, n). Plain modulo; the bias is ~n/2^64 and irrelevant at
/// the pool sizes this project handles.
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
    return eng() % n;
}

/// Uniform double in [0, 1) with 53 random mantissa bits.
inline double unit_double(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. Draws two uniforms per call and returns
/// one variate; the spare is discarded to keep the stream position simple.
inline double gaussian(Engine& eng) {
    double u1 = unit_double(eng);
    const double u2 = unit_double(eng);
    if (u1 <= 0.0) {
        u1 = 0x1.0p-53;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// FNV-1a over the bytes of `s`, with the seed mixed into the offset basis.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0) {
    std::uint64_t h = 1469598103934665603ull ^ (seed * 0x9E3779B97F4A7C15ull);
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace icl::rng
