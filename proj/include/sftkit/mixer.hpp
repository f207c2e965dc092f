#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sftkit/rng.hpp"

namespace sftkit {

enum class MixUnit { DocumentCount, ByteWeighted };

// Ratio-and-seed mixing recipe. Ratios are stored gcd-reduced, so
// 80:20 and 4:1 are the same spec.
struct MixSpec {
    std::uint64_t ratio_a = 7;
    std::uint64_t ratio_b = 3;
    MixUnit unit = MixUnit::DocumentCount;
    std::uint64_t seed = 0;

    MixSpec() = default;
    MixSpec(std::uint64_t a, std::uint64_t b, MixUnit u, std::uint64_t s)
        : ratio_a(a), ratio_b(b), unit(u), seed(s) {
        if (ratio_a == 0 && ratio_b == 0) {
            throw std::invalid_argument("mix ratio must have a positive component");
        }
        const std::uint64_t g = std::gcd(ratio_a, ratio_b);
        if (g > 1) {
            ratio_a /= g;
            ratio_b /= g;
        }
    }
};

struct SplitSpec {
    double validation_fraction = 0.10;
    std::uint64_t seed = 0;

    SplitSpec() = default;
    SplitSpec(double fraction, std::uint64_t s) : validation_fraction(fraction), seed(s) {
        if (!(fraction > 0.0 && fraction < 1.0)) {
            throw std::invalid_argument("validation_fraction must lie in (0,1)");
        }
    }
};

struct MixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decides how many items of each pool survive. DocumentCount: the
// relatively over-supplied pool is cut to round(n_other * r_this/r_other)
// so |count_a*ratio_b - count_b*ratio_a| <= max(ratio_a, ratio_b)/2.
std::pair<std::size_t, std::size_t> mix_counts(std::size_t n_a, std::size_t n_b,
                                               const MixSpec& spec);

// Seeded mix of two pools. Subsampling is without replacement and
// preserves each pool's relative order; the final sequence is a seeded
// interleave weighted by remaining counts. Items paired with a byte
// weight for the ByteWeighted unit.
struct WeightedItem {
    std::string payload;
    std::uint64_t bytes = 0;
};

std::vector<std::string> mix(const std::vector<std::string>& pool_a,
                             const std::vector<std::string>& pool_b, const MixSpec& spec);
std::vector<std::string> mix_weighted(const std::vector<WeightedItem>& pool_a,
                                      const std::vector<WeightedItem>& pool_b,
                                      const MixSpec& spec);

struct SplitResult {
    std::vector<std::string> train;
    std::vector<std::string> validation;
};

// Validation size = round-half-up(n * fraction), clamped to [1, n-1].
// Both sides keep the input's relative order; membership is a seeded
// draw without replacement.
SplitResult split(const std::vector<std::string>& records, const SplitSpec& spec);

}  // namespace sftkit
