#pragma once

#include <cstdint>

namespace xppn {

// xoshiro256** 1.0 (Blackman/Vigna), seeded by expanding the 64-bit seed
// through splitmix64. The generator and the derived-draw rules below are
// the reproducibility contract for instance generation: any implementation
// that follows them reproduces the same streams bit-exactly.
//
//   next()        -> raw 64-bit output
//   next_double() -> (next() >> 11) * 2^-53, uniform in [0,1)
//   uniform(a,b)  -> a + next_double() * (b - a)
//   uniform_int(lo,hi) -> lo + floor(next_double() * (hi - lo + 1)), clamped
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            // splitmix64
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
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

    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

    int uniform_int(int lo, int hi) {
        int v = lo + static_cast<int>(next_double() * static_cast<double>(hi - lo + 1));
        return v > hi ? hi : v;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace xppn
