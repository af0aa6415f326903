#pragma once

#include <cmath>
#include <cstdint>

namespace subg {

// Counter-based deterministic randomness: every draw is a pure function of
// (seed, trial, step, draw) and never depends on call order, so simulations
// are bit-reproducible under any parallel chunking.

/// 64-bit avalanche finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t trial,
                                  std::uint64_t step, std::uint64_t draw) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (trial * 0xbf58476d1ce4e5b9ULL + 0x243f6a8885a308d3ULL));
    h = mix64(h ^ (step * 0x94d049bb133111ebULL + 0x13198a2e03707344ULL));
    h = mix64(h ^ (draw * 0x2545f4914f6cdd1dULL + 0xa4093822299f31d0ULL));
    return h;
}

/// Uniform on the open interval (0, 1); never returns an endpoint.
inline double counter_uniform01(std::uint64_t seed, std::uint64_t trial,
                                std::uint64_t step, std::uint64_t draw) {
    const std::uint64_t x = counter_bits(seed, trial, step, draw);
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes draws (2 draw, 2 draw + 1).
inline double counter_normal(std::uint64_t seed, std::uint64_t trial,
                             std::uint64_t step, std::uint64_t draw) {
    const double u1 = counter_uniform01(seed, trial, step, 2 * draw);
    const double u2 = counter_uniform01(seed, trial, step, 2 * draw + 1);
    constexpr double kTwoPi = 6.283185307179586;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Fair sign in {-1, +1}.
inline double counter_sign(std::uint64_t seed, std::uint64_t trial,
                           std::uint64_t step, std::uint64_t draw) {
    return (counter_bits(seed, trial, step, draw) & 1u) ? 1.0 : -1.0;
}

} // namespace subg
