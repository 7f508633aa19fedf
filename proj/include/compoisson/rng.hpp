#pragma once

#include <cstdint>

namespace compoisson {

// xoshiro256++ with splitmix64 seeding (Blackman & Vigna). Chosen over
// std::mt19937 so streams are cheap to split and the byte-level sequence is
// pinned by this header alone, independent of the standard library build.
//
// split(k) derives an unrelated stream from (seed, k); sampling operations
// record the seed they were given so runs are reproducible bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            word = mix64(sm);
        }
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

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const noexcept { return seed_; }

    // Independent stream keyed by (seed, stream). Does not touch this state.
    Rng split(std::uint64_t stream) const {
        return Rng(mix64(seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1))));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4] = {};
    std::uint64_t seed_ = 0;
};

}  // namespace compoisson
