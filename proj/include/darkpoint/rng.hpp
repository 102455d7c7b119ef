#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace darkpoint {

/// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, constant-time jump,
/// identical output on every platform. All randomness in the project flows
/// through this generator so a single seed reproduces a whole run.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller. Spelled out rather than delegated to
    /// std::normal_distribution, whose stream is implementation-defined.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Decorrelated seed for an indexed substream. Trials each own a substream,
/// so they can execute in any order (or in parallel) and still reproduce
/// bit-identically.
inline uint64_t substream_seed(uint64_t seed, uint64_t stream) {
    return SplitMix64(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1))).next();
}

}  // namespace darkpoint
