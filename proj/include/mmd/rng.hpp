#pragma once
// Counter-based random numbers: every variate is a pure function of
// (seed, stream, counter), so parallel and sequential evaluation orders
// produce identical draws.

#include <cstdint>
#include <span>

#include "mmd/core.hpp"

namespace mmd::rng {

inline constexpr std::uint64_t kStreamSource = 1;
inline constexpr std::uint64_t kStreamChannel = 2;
inline constexpr std::uint64_t kStreamApply = 3;
inline constexpr std::uint64_t kStreamTrial = 4;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t base = mix64(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    return mix64(base + 0x9E3779B97F4A7C15ULL * (counter + 1));
}

// uniform in [0, 1) with 53 random bits
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(at(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// derive an independent sub-seed, e.g. one per Monte Carlo trial
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return at(seed, kStreamTrial, index);
}

// inverse-CDF draw from a probability vector
inline Symbol sample(std::span<const double> pmf, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
        cum += pmf[i];
        if (u < cum) return static_cast<Symbol>(i);
    }
    return static_cast<Symbol>(pmf.size() - 1);
}

}  // namespace mmd::rng
