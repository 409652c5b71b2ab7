#pragma once

#include <cstdint>

namespace dyskew {

// Fixed 64-bit PRNG (splitmix-style state advance). The exact constants and
// update sequence below are the portability contract: any implementation in
// any language that reproduces them draws identical workloads from the same
// seed.
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Derived draws (documented because they are part of the contract):
//   next_below(n)  = next() % n
//   next_unit()    = (next() >> 11) * 2^-53          (double in [0, 1))
//   next_range(lo, hi) = lo + next_below(hi - lo + 1) (inclusive bounds)
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t next_below(std::uint64_t n) {
        return n == 0 ? 0 : next() % n;
    }

    constexpr std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + next_below(hi - lo + 1);
    }

    constexpr double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

} // namespace dyskew
