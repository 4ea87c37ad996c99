#pragma once

#include <cstdint>

namespace reisda {

// SplitMix64: tiny, well-mixed 64-bit generator. Used for all stochastic
// initialization so runs reproduce bit-for-bit on any platform, which the
// standard <random> distributions do not guarantee.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [-half_width, half_width)
    double next_symmetric(double half_width) { return (2.0 * next_double() - 1.0) * half_width; }

private:
    std::uint64_t state_;
};

}  // namespace reisda
