#pragma once

#include <cstdint>
#include <vector>

#include "ezdit/common.hpp"

namespace ezdit {

// Deterministic PRNG used everywhere a random value is drawn.
//
// Algorithm: xoshiro256** seeded through splitmix64. The value streams are
// fixed by this file and do not depend on platform or standard library:
//   - next()      one 64-bit draw
//   - uniform()   53-bit mantissa in [0, 1)
//   - normal()    Box-Muller, consumes exactly two 64-bit draws per value
//                 (the sine half of the pair is discarded, no caching)
class Rng {
public:
    explicit Rng(uint64_t seed = 0) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t x = seed;
        for (auto& s : state_) {
            s = splitmix64(x);
        }
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [0, n), via rejection-free scaling of the 53-bit uniform.
    int64_t uniform_int(int64_t n) {
        require(n > 0, "Rng::uniform_int: n must be positive, got ", n);
        auto v = static_cast<int64_t>(uniform() * static_cast<double>(n));
        return v < n ? v : n - 1;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller (cosine branch only).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Independent child stream; distinct tags give distinct streams.
    Rng fork(uint64_t tag) const {
        uint64_t x = state_[0] ^ (tag * 0x9e3779b97f4a7c15ULL);
        Rng child(0);
        for (auto& s : child.state_) {
            s = splitmix64(x);
        }
        return child;
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t state_[4] = {};
};

} // namespace ezdit
