#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace msg {

// Derives an independent child seed from (seed, index). splitmix64-style
// mixing so derived streams do not overlap for nearby indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic, cross-platform random source. mt19937_64 is fully
// specified by the standard; Gaussian draws use our own Box-Muller so
// sequences do not depend on libstdc++'s normal_distribution.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Raw engine words consumed so far; the sampler's stream-contract tests
    // compare these counts across guidance modes.
    std::uint64_t draws() const { return draws_; }

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Consumes exactly two uniforms per
    // call (the sine branch is discarded) so the draw count per call is
    // fixed, which the sampler's stream contract relies on.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is tiny next to 2^64.
        return next_u64() % n;
    }

    SeededRng child(std::uint64_t index) const {
        return SeededRng(derive_seed(seed_, index));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

}  // namespace msg
