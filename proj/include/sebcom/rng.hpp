// Copyright 2026 The sebcom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random streams. Every stochastic step in the library draws
// from these generators so that runs are reproducible across platforms.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

namespace sebcom {

class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

/// Derive an independent seed for sub-stream `index` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    SplitMix64 sm(seed ^ index);
    return sm();
}

/// xoshiro256** 1.0, state filled from splitmix64(seed).
class Xoshiro256ss {
  public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256ss(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& s : s_) s = sm();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        const result_type result = rotl(s_[1] * 5, 7) * 9;
        const result_type t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        auto idx = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

  private:
    static constexpr result_type rotl(result_type x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    result_type s_[4]{};
};

/// Standard normal draws via Box-Muller; each pair of uniforms yields two
/// normals, consumed cosine branch first.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) noexcept : rng_(seed) {}

    double operator()() noexcept {
        if (spare_) {
            double v = *spare_;
            spare_.reset();
            return v;
        }
        const double u1 = 1.0 - rng_.uniform();  // (0, 1]
        const double u2 = rng_.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        return r * std::cos(theta);
    }

  private:
    Xoshiro256ss rng_;
    std::optional<double> spare_;
};

}  // namespace sebcom
