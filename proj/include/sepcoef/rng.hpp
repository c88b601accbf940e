// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random numbers. Every consumer derives an independent
// stream from (seed, purpose tag, index...) through a mixing chain, so the
// draw for row k / replicate k / rep r is the same no matter which thread
// produces it or in which order work is scheduled.

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace sepcoef {

namespace rng {

/// SplitMix64 finalizer: one bijective avalanche step on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t word) {
    return mix64(key ^ (0xA0761D6478BD642FULL + mix64(word)));
}

/// Stream tags keep unrelated consumers of the same user seed apart.
enum Stream : std::uint64_t {
    kNeighborTie = 1,
    kPermutation = 2,
    kEstimator = 3,
    kSelection = 4,
    kScenarioRep = 5,
    kGenerate = 6,
    kXiTie = 7,
    kObserved = 8,
};

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return combine(mix64(seed), stream);
}
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t a) {
    return combine(derive_key(seed, stream), a);
}
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t a,
                                   std::uint64_t b) {
    return combine(derive_key(seed, stream, a), b);
}

} // namespace rng

/// SplitMix64 sequence over a derived key. Satisfies
/// UniformRandomBitGenerator but all library call sites draw through the
/// explicit helpers below so results do not depend on any std:: algorithm's
/// unspecified consumption pattern.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : state_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Unbiased draw from {0, ..., bound-1} by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1); safe for logs and quantile maps.
    double uniform_open01() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    std::uint64_t state_;
};

/// In-place Fisher-Yates; spelled out rather than std::shuffle so the
/// permutation is reproducible across standard libraries.
template <typename T>
void fisher_yates(std::span<T> v, CounterRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

inline std::vector<std::size_t> random_permutation(std::size_t n, CounterRng& rng) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    fisher_yates(std::span<std::size_t>(p), rng);
    return p;
}

} // namespace sepcoef
