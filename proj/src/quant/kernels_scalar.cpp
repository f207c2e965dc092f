#include <cmath>

#include "sftkit/quant/kernels.hpp"

namespace sftkit::quant {

namespace {

float absmax_scalar(const float* x, std::size_t n) {
    float m = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
        const float a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

// Branchless lower bound over a power-of-two-sized sorted array:
// returns the first index with cb[idx] >= x, in [0, size].
inline int lower_bound_pow2(const float* cb, int size, float x) {
    int idx = 0;
    for (int step = size >> 1; step > 0; step >>= 1) {
        const int cand = idx + step;
        idx = (cb[cand - 1] < x) ? cand : idx;
    }
    if (cb[idx] < x) ++idx;
    return idx;
}

void encode_block_scalar(const float* x, std::size_t n, float c2, const float* cb, int bits,
                         std::uint8_t* codes) {
    const int size = 1 << bits;
    for (std::size_t i = 0; i < n; ++i) {
        const float v = x[i] / c2;
        const int ub = lower_bound_pow2(cb, size, v);
        int code;
        if (ub == 0) {
            code = 0;
        } else if (ub == size) {
            code = size - 1;
        } else {
            const float d_lo = v - cb[ub - 1];
            const float d_hi = cb[ub] - v;
            code = (d_lo <= d_hi) ? ub - 1 : ub;  // tie -> lower index
        }
        codes[i] = static_cast<std::uint8_t>(code);
    }
}

void decode_block_scalar(const std::uint8_t* codes, std::size_t n, float c2, const float* cb,
                         float* out) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = cb[codes[i]] * c2;
    }
}

void gemm_nn_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t col = 0; col < n; ++col) {
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                acc += a[i * k + j] * b[j * n + col];
            }
            c[i * n + col] = acc;
        }
    }
}

void gemm_tn_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t ka,
                    std::size_t n) {
    for (std::size_t r = 0; r < ka; ++r) {
        for (std::size_t col = 0; col < n; ++col) {
            double acc = 0.0;
            for (std::size_t row = 0; row < m; ++row) {
                acc += a[row * ka + r] * b[row * n + col];
            }
            c[r * n + col] = acc;
        }
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels table = {
        "scalar",          absmax_scalar,  encode_block_scalar,
        decode_block_scalar, gemm_nn_scalar, gemm_tn_scalar,
    };
    return table;
}

}  // namespace sftkit::quant
