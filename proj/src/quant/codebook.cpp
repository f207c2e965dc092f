#include "sftkit/quant/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sftkit::quant {

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("inverse_normal_cdf requires p in (0,1)");
    }

    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    constexpr double p_high = 1.0 - p_low;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= p_high) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the exact CDF brings the error to ~1e-15.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

double Codebook::half_max_gap() const {
    double max_gap = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        max_gap = std::max(max_gap, values[i] - values[i - 1]);
    }
    return max_gap / 2.0;
}

Codebook build_nf_codebook(int k) {
    if (k < 2 || k > 8) {
        throw std::invalid_argument("codebook bits must lie in [2,8]");
    }
    const std::size_t n = std::size_t{1} << k;
    const std::size_t half = n / 2;

    // Extreme quantile probability. At k=4 this evaluates to the familiar
    // 0.9677083 offset; the two denominators spread the tail mass between
    // the 2^k-level and (2^k - 1)-level grids.
    const double p_max =
        1.0 - 0.5 * (1.0 / static_cast<double>(2 * n) + 1.0 / static_cast<double>(2 * (n - 1)));

    auto linspace = [](double from, double to, std::size_t count) {
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        return out;
    };
    auto quantile = [](double p) { return p == 0.5 ? 0.0 : inverse_normal_cdf(p); };

    // Negative side mirrors quantiles of [p_max, 0.5] (2^(k-1) points,
    // ending at the exact zero); positive side takes 2^(k-1) points of
    // the finer grid [p_max, 0.5) so the total is 2^k with one zero.
    std::vector<double> raw;
    raw.reserve(n);
    for (double p : linspace(p_max, 0.5, half)) raw.push_back(-quantile(p));
    const auto pos_grid = linspace(p_max, 0.5, half + 1);
    for (std::size_t i = 0; i < half; ++i) raw.push_back(quantile(pos_grid[i]));

    const double extreme = *std::max_element(raw.begin(), raw.end(),
                                             [](double x, double y) {
                                                 return std::abs(x) < std::abs(y);
                                             });
    const double scale = std::abs(extreme);
    for (double& v : raw) v = v == 0.0 ? 0.0 : v / scale;
    std::sort(raw.begin(), raw.end());

    Codebook cb;
    cb.bits = k;
    cb.values = std::move(raw);
    cb.values_f32.reserve(n);
    for (double v : cb.values) cb.values_f32.push_back(static_cast<float>(v));

    // Construction self-checks; these are the type's invariants.
    if (cb.values.size() != n) throw std::logic_error("codebook size");
    if (cb.values.front() != -1.0 || cb.values.back() != 1.0) {
        throw std::logic_error("codebook endpoints");
    }
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cb.values[i] == 0.0) {
            zeros++;
            cb.zero_index = i;
        }
        if (i > 0 && (!(cb.values[i] > cb.values[i - 1]) ||
                      !(cb.values_f32[i] > cb.values_f32[i - 1]))) {
            throw std::logic_error("codebook not strictly increasing");
        }
    }
    if (zeros != 1) throw std::logic_error("codebook must contain exactly one zero");
    return cb;
}

}  // namespace sftkit::quant
