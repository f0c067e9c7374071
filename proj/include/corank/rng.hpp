#pragma once

#include <cstdint>

namespace corank {

// Deterministic generator: xoshiro256** seeded through splitmix64.
// Pure 64-bit integer arithmetic, so streams are identical on every platform.
struct Rng {
    uint64_t s[4];

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s) w = splitmix64(x);
    }

    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t next() {
        uint64_t result = rotl(s[1] * 5, 7) * 9;
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // low k bits of one draw, k in [0, 64]
    uint64_t bits(uint32_t k) {
        if (k == 0) return 0;
        uint64_t v = next();
        return k >= 64 ? v : (v & ((uint64_t(1) << k) - 1));
    }

    // shard sub-seed scheme used by the Monte Carlo engine
    static uint64_t sub_seed(uint64_t seed, uint64_t shard) {
        uint64_t x = seed + 0x9e3779b97f4a7c15ull * (shard + 1);
        return splitmix64(x);
    }
};

}  // namespace corank
