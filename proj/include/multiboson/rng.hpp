#pragma once

#include <cmath>
#include <cstdint>

namespace multiboson {

/// SplitMix64: a 64-bit counter-based generator. The state advances by a
/// fixed odd increment per draw and the output is a bijective hash of the
/// counter, so a given seed reproduces the same stream on any platform.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal variate via Box-Muller; draws two uniforms per pair.
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = next_uniform();
        const double u2 = next_uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(u1) must be finite
        const double radius = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        cached_ = radius * std::sin(two_pi * u2);
        has_cached_ = true;
        return radius * std::cos(two_pi * u2);
    }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace multiboson
