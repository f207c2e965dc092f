#pragma once

#include <cstddef>
#include <vector>

namespace sftkit::quant {

// k-bit NormalFloat codebook: 2^k strictly increasing levels in [-1, 1],
// placed at standard-normal quantiles of evenly spaced probabilities and
// rescaled so the extremes are exactly -1 and +1, with exactly one exact
// zero level. Suits weight tensors that are approximately normal.
struct Codebook {
    int bits = 8;
    std::vector<double> values;      // reference precision
    std::vector<float> values_f32;   // kernel precision (same levels, rounded once)
    std::size_t zero_index = 0;

    std::size_t size() const { return values.size(); }

    // Half the largest gap between adjacent levels; the worst-case
    // normalized rounding error for inputs in [-1,1].
    double half_max_gap() const;
};

// k in [2, 8]. Throws std::invalid_argument outside that range.
Codebook build_nf_codebook(int k);

// Standard normal quantile function, accurate to ~1e-15 (rational
// approximation refined by one Halley step against erfc).
double inverse_normal_cdf(double p);

}  // namespace sftkit::quant
