#pragma once

#include <cstdint>

namespace latsm {

// Counter-based randomness: every draw is a pure function of (seed, counter),
// so lattice sites and Monte Carlo replicates can be filled in any order (or
// in parallel) with identical results.

/// SplitMix64 finalizer applied to the counter stream of `seed`.
inline std::uint64_t mix_u64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed; used to split master seeds by study/n/replicate.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix_u64(seed ^ 0xD1B54A32D192ED03ULL, stream);
}

/// Uniform double in (0,1), 53-bit resolution, never exactly 0 or 1.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = mix_u64(seed, counter);
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// Standard normal quantile (inverse CDF), accurate to ~1e-15.
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

} // namespace latsm
