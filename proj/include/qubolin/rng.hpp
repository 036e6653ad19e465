#pragma once

#include <cstdint>

namespace qubolin {

// Deterministic generators with published reference constants, so that a seed
// reproduces the same stream on any platform/language. std::mt19937 plus the
// standard distributions would not give that (distribution output is
// implementation-defined).

/// SplitMix64 (Steele, Lea, Flood 2014). Used for seeding and stream mixing.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256++ 1.0 (Blackman & Vigna 2019), state seeded via SplitMix64.
class Xoshiro256PlusPlus {
public:
    explicit Xoshiro256PlusPlus(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& s : state_) s = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1): top 53 bits scaled by 2⁻⁵³.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, bound) by rejection (bound > 0).
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    bool next_bit() { return (next() >> 63) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Stable mix of a base seed with stream labels (iteration, block, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label_a,
                                 std::uint64_t label_b = 0) {
    SplitMix64 sm(base);
    std::uint64_t s = sm.next();
    s ^= SplitMix64(label_a ^ 0xA0761D6478BD642FULL).next();
    s ^= SplitMix64(label_b ^ 0xE7037ED1A0B428DBULL).next();
    return SplitMix64(s).next();
}

}  // namespace qubolin
