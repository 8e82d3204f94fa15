#pragma once

#include <cstdint>
#include <random>

namespace uwoam {

/// splitmix64 finalizer; used to derive independent seeds from
/// (master_seed, index...) tuples without coordination between streams.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(mix64(a) ^ b); }
inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) { return mix64(mix64(a, b) ^ c); }

/// Deterministic stream for one (seed, draw_index) pair.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(mix64(seed)) {}
    Rng(uint64_t seed, uint64_t draw_index) : eng_(mix64(seed, draw_index)) {}

    double gaussian(double mean = 0.0, double sigma = 1.0) {
        std::normal_distribution<double> d(mean, sigma);
        return d(eng_);
    }

    double uniform() {
        std::uniform_real_distribution<double> d(0.0, 1.0);
        return d(eng_);
    }

    uint32_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::poisson_distribution<uint32_t> d(mean);
        return d(eng_);
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace uwoam
