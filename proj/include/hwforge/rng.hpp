#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hwforge {

// SplitMix64 finalizer (Steele/Lea/Vigna). Used both for per-sample seed
// derivation and for expanding one 64-bit seed into xoshiro state.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    std::uint64_t state;

    explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        state += kGoldenGamma;
        return splitmix64_finalize(state);
    }
};

// xoshiro256** (Blackman/Vigna), seeded via SplitMix64 as recommended by the
// authors. All randomized pipeline decisions are drawn from this generator so
// that runs are reproducible bit-for-bit within one build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1): take the 53 high bits of one draw, scale by 2^-53.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform_real(double lo, double hi) {
        return lo + uniform01() * (hi - lo);
    }

    // Uniform integer in [lo, hi], both inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const double span = static_cast<double>(hi - lo) + 1.0;
        auto v = lo + static_cast<std::int64_t>(uniform01() * span);
        return v > hi ? hi : v;
    }

    // Standard normal via the trigonometric Box-Muller transform. Consumes
    // exactly two uniforms per draw (no cached spare) so the stream position
    // after n draws is the same everywhere.
    double gaussian(double mean, double stddev) {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log() finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Quantization rule used everywhere a real becomes an 8-bit intensity:
// round to nearest (half away from zero), then clamp to [0, 255].
inline std::uint8_t quantize_intensity(double v) {
    const long r = std::lround(v);
    if (r < 0) return 0;
    if (r > 255) return 255;
    return static_cast<std::uint8_t>(r);
}

} // namespace hwforge
