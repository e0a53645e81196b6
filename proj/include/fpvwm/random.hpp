#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fpvwm {

// splitmix64 step (Vigna). Used for seed derivation so that independent
// sub-streams (noise, loss, per-trial placements) never share state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministically derive a sub-seed from a master seed and stream indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = seed;
    std::uint64_t z = splitmix64(s);
    s ^= z + a;
    z = splitmix64(s);
    s ^= z + b;
    z = splitmix64(s);
    s ^= z + c;
    return splitmix64(s);
}

// Deterministic RNG: draws are produced from raw mt19937_64 output, not from
// std::*_distribution (whose sequences are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi], rejection-sampled to avoid modulo bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_()); // full range
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t u;
        do {
            u = engine_();
        } while (u >= limit);
        return lo + static_cast<std::int64_t>(u % span);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller; the spare value is cached, so draw
    // order is fully determined by the call sequence.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fpvwm
