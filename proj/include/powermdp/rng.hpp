#pragma once

// Counter-based SplitMix64. Output n of stream `seed` is
//   mix(seed + n * 0x9E3779B97F4A7C15)
// so any position of the stream is available without generating the prefix.

#include <cstdint>

namespace powermdp::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// n-th output (n >= 1 reproduces the classic sequential SplitMix64).
constexpr std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t n) noexcept { return mix(seed + n * kGolden); }

/// Uniform in the open interval (0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform used for state `state` of reward sample `index`.
constexpr double uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t num_states,
                         std::uint64_t state) noexcept {
    return to_unit(splitmix64(seed, index * num_states + state + 1));
}

} // namespace powermdp::rng
