#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace citest {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to decorrelate derived stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream keyed by (seed, a, b). Results computed on a stream never
/// depend on which thread consumes it or in which order streams are created.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    const std::uint64_t k = mix64(mix64(mix64(seed) ^ (a + 0x632be59bd9b4e019ULL)) ^
                                  (b + 0x85157af5b2d1a7c3ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) without modulo bias. n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::span<T> v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// Index drawn from an unnormalised nonnegative weight vector.
inline std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    // rounding can leave u marginally above the last weight
    for (std::size_t i = weights.size(); i > 0; --i)
        if (weights[i - 1] > 0.0) return i - 1;
    return 0;
}

}  // namespace citest
