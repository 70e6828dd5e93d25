// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace prefkit {

/// Deterministic random generator built on the splitmix64 mixer.
///
/// Every distribution is hand-rolled on top of the raw 64-bit stream so that
/// a given seed produces bit-identical sequences on any platform or standard
/// library. This is what makes checkpoints, selections and CLI summaries
/// reproducible from a single seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// One splitmix64 step.
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 bits of mantissa.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Standard Gumbel draw, used for Plackett-Luce ranking sampling.
    double gumbel() {
        double u = uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        return -std::log(-std::log(u));
    }

    /// Unbiased integer in [0, bound) via rejection sampling. bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// k distinct indices drawn uniformly from [0, n), in ascending order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Stage seeds are one splitmix64 step of (root ^ fnv1a64(label)). A single
/// global seed fans out into independent per-stage streams this way.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

/// Indexed variant for per-epoch / per-item streams.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace prefkit
