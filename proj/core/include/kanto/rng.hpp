#pragma once

#include <cstdint>

namespace kanto {

// Counter-based generator in the SplitMix64 family: output k of stream s is
// mix(seed_mix(s) + (k+1)*GAMMA). Jumping to any position is O(1), streams
// derived from distinct (seed, stream_id) pairs never share state, and the
// sequence is identical regardless of platform or thread count.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream_id = 0)
        : state_(mix(seed ^ mix(stream_id + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform in [0,1), 53 random bits
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace kanto
