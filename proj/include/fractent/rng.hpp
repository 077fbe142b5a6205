#pragma once

#include <cstdint>

namespace fractent {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter). Reproducible under any evaluation order or
// thread count, which is what the coefficient realizations require.

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = mix64(seed ^ 0xD1B54A32D192ED03ULL);
    h = mix64(h ^ stream);
    return mix64(h ^ counter);
}

// Uniform in [0, 1).
inline double rng_double(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(rng_word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Uniform in [0, bound). Modulo bias is negligible for bound << 2^64.
inline std::uint64_t rng_below(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                               std::uint64_t bound) {
    return rng_word(seed, stream, counter) % bound;
}

// Stream identifiers used across the library. Fixed constants so draws
// never collide between different uses of the same user seed.
namespace rng_stream {
inline constexpr std::uint64_t kAmplitude = 0x416D706C69747564ULL;
inline constexpr std::uint64_t kPhase = 0x5068617365416E67ULL;
inline constexpr std::uint64_t kZeroPositions = 0x5A65726F506F7369ULL;
inline constexpr std::uint64_t kCantorKeep = 0x43616E746F724B65ULL;
inline constexpr std::uint64_t kOracleCases = 0x4F7261636C654361ULL;

inline std::uint64_t with_step(std::uint64_t base, int k) {
    return mix64(base ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1)));
}
}  // namespace rng_stream

}  // namespace fractent
