// Deterministic, splittable 64-bit RNG used for all sampling.
//
// Generator: xoshiro256** (Blackman/Vigna), seeded through SplitMix64.
// Streams for independent trials are derived by hashing the master seed
// with the trial and factor indices, so results are bit-identical across
// runs and thread counts. Sampling decisions never use floating point.
#pragma once

#include <array>
#include <cstdint>

namespace permrep {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash-combine used to derive independent sub-streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2));
    std::uint64_t out = splitmix64(s);
    return out ^ splitmix64(s);
}

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // Stream for (seed, trial) or (seed, trial, factor).
    static Xoshiro256 stream(std::uint64_t seed, std::uint64_t trial) {
        return Xoshiro256(mix_seed(seed, trial));
    }
    static Xoshiro256 stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t factor) {
        return Xoshiro256(mix_seed(mix_seed(seed, trial), factor));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform integer in [0, bound) by rejection; exact, no floating point.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = ~0ULL - ~0ULL % bound;
        std::uint64_t draw;
        do { draw = (*this)(); } while (draw >= limit);
        return draw % bound;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

} // namespace permrep
