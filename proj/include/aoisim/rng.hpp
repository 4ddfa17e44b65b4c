#pragma once

#include <cstdint>

namespace aoisim {

// splitmix64 finalizer, used to derive well-separated stream seeds.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// One replication's private random stream (xoshiro256++, splitmix-seeded).
// The caller fixes the draw order (device 0..D-1, harvest draw before
// decision draw), so a (master_seed, stream_id) pair reproduces the identical
// slot trajectory on every run and platform.
class RandomStream {
public:
    RandomStream(uint64_t master_seed, uint64_t stream_id) {
        uint64_t sm = master_seed ^ mix64(stream_id);
        for (uint64_t& word : state_) {
            sm += 0x9E3779B97F4A7C15ull;
            word = mix64(sm);
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53-bit resolution.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_uniform() < p; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4];
};

}  // namespace aoisim
