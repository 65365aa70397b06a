#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sdf {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(mix_seed(mix_seed(base) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_int(Rng& rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline double standard_normal(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// Poisson draw by inversion of the CDF (one uniform per draw).
inline unsigned poisson(Rng& rng, double lambda) {
    const double u = uniform01(rng);
    double p = std::exp(-lambda);
    double cdf = p;
    unsigned k = 0;
    while (u > cdf && k < 10000) {
        ++k;
        p *= lambda / k;
        cdf += p;
        if (p == 0.0) break;
    }
    return k;
}

}  // namespace sdf
