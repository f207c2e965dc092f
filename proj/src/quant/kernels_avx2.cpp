// AVX2 variants of the quant kernels. This translation unit is compiled
// with -mavx2 and only ever called after a runtime CPU check. Each kernel
// keeps the scalar reference's exact arithmetic: same per-element float
// ops, same per-output accumulation order, mul-then-add instead of FMA —
// the equivalence tests require bit-identical results.

#include <immintrin.h>

#include <cmath>

#include "sftkit/quant/kernels.hpp"

namespace sftkit::quant {

namespace {

float absmax_avx2(const float* x, std::size_t n) {
    const __m256 sign_mask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7FFFFFFF));
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_and_ps(_mm256_loadu_ps(x + i), sign_mask);
        acc = _mm256_max_ps(acc, v);
    }
    alignas(32) float lanes[8];
    _mm256_store_ps(lanes, acc);
    float m = 0.0f;
    for (float lane : lanes) {
        if (lane > m) m = lane;
    }
    for (; i < n; ++i) {
        const float a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

inline int lower_bound_pow2(const float* cb, int size, float x) {
    int idx = 0;
    for (int step = size >> 1; step > 0; step >>= 1) {
        const int cand = idx + step;
        idx = (cb[cand - 1] < x) ? cand : idx;
    }
    if (cb[idx] < x) ++idx;
    return idx;
}

inline void encode_one(const float* cb, int size, float v, std::uint8_t* code) {
    const int ub = lower_bound_pow2(cb, size, v);
    int c;
    if (ub == 0) {
        c = 0;
    } else if (ub == size) {
        c = size - 1;
    } else {
        const float d_lo = v - cb[ub - 1];
        const float d_hi = cb[ub] - v;
        c = (d_lo <= d_hi) ? ub - 1 : ub;
    }
    *code = static_cast<std::uint8_t>(c);
}

void encode_block_avx2(const float* x, std::size_t n, float c2, const float* cb, int bits,
                       std::uint8_t* codes) {
    const int size = 1 << bits;
    const __m256 c2v = _mm256_set1_ps(c2);
    const __m256i one = _mm256_set1_epi32(1);
    const __m256i max_idx = _mm256_set1_epi32(size - 1);

    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_div_ps(_mm256_loadu_ps(x + i), c2v);

        // Vectorized branchless lower bound (8 lanes in lockstep).
        __m256i idx = _mm256_setzero_si256();
        for (int step = size >> 1; step > 0; step >>= 1) {
            const __m256i cand = _mm256_add_epi32(idx, _mm256_set1_epi32(step));
            const __m256i probe = _mm256_sub_epi32(cand, one);
            const __m256 gathered = _mm256_i32gather_ps(cb, probe, 4);
            const __m256 lt = _mm256_cmp_ps(gathered, v, _CMP_LT_OQ);
            idx = _mm256_blendv_epi8(idx, cand, _mm256_castps_si256(lt));
        }
        {
            const __m256 gathered = _mm256_i32gather_ps(cb, idx, 4);
            const __m256 lt = _mm256_cmp_ps(gathered, v, _CMP_LT_OQ);
            // mask lanes are -1 where cb[idx] < v; subtracting adds 1.
            idx = _mm256_sub_epi32(idx, _mm256_castps_si256(lt));
        }

        // Candidates idx-1 and idx, clamped to the table; pick by the
        // same (d_lo <= d_hi -> lower) rule as the scalar path.
        const __m256i lo = _mm256_max_epi32(_mm256_sub_epi32(idx, one), _mm256_setzero_si256());
        const __m256i hi = _mm256_min_epi32(idx, max_idx);
        const __m256 cb_lo = _mm256_i32gather_ps(cb, lo, 4);
        const __m256 cb_hi = _mm256_i32gather_ps(cb, hi, 4);
        const __m256 d_lo = _mm256_sub_ps(v, cb_lo);
        const __m256 d_hi = _mm256_sub_ps(cb_hi, v);
        const __m256 take_hi = _mm256_cmp_ps(d_lo, d_hi, _CMP_GT_OQ);
        const __m256i code = _mm256_blendv_epi8(lo, hi, _mm256_castps_si256(take_hi));

        alignas(32) std::int32_t lanes[8];
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), code);
        for (int lane = 0; lane < 8; ++lane) {
            codes[i + static_cast<std::size_t>(lane)] = static_cast<std::uint8_t>(lanes[lane]);
        }
    }
    for (; i < n; ++i) {
        encode_one(cb, size, x[i] / c2, codes + i);
    }
}

void decode_block_avx2(const std::uint8_t* codes, std::size_t n, float c2, const float* cb,
                       float* out) {
    const __m256 c2v = _mm256_set1_ps(c2);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m128i raw = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(codes + i));
        const __m256i idx = _mm256_cvtepu8_epi32(raw);
        const __m256 levels = _mm256_i32gather_ps(cb, idx, 4);
        _mm256_storeu_ps(out + i, _mm256_mul_ps(levels, c2v));
    }
    for (; i < n; ++i) {
        out[i] = cb[codes[i]] * c2;
    }
}

void gemm_nn_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                  std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t col = 0;
        for (; col + 4 <= n; col += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t j = 0; j < k; ++j) {
                const __m256d av = _mm256_set1_pd(a[i * k + j]);
                const __m256d bv = _mm256_loadu_pd(b + j * n + col);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(av, bv));
            }
            _mm256_storeu_pd(c + i * n + col, acc);
        }
        for (; col < n; ++col) {
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                acc += a[i * k + j] * b[j * n + col];
            }
            c[i * n + col] = acc;
        }
    }
}

void gemm_tn_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t ka,
                  std::size_t n) {
    for (std::size_t r = 0; r < ka; ++r) {
        std::size_t col = 0;
        for (; col + 4 <= n; col += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t row = 0; row < m; ++row) {
                const __m256d av = _mm256_set1_pd(a[row * ka + r]);
                const __m256d bv = _mm256_loadu_pd(b + row * n + col);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(av, bv));
            }
            _mm256_storeu_pd(c + r * n + col, acc);
        }
        for (; col < n; ++col) {
            double acc = 0.0;
            for (std::size_t row = 0; row < m; ++row) {
                acc += a[row * ka + r] * b[row * n + col];
            }
            c[r * n + col] = acc;
        }
    }
}

}  // namespace

const Kernels* avx2_kernels_impl() {
    static const Kernels table = {
        "avx2",           absmax_avx2,  encode_block_avx2,
        decode_block_avx2, gemm_nn_avx2, gemm_tn_avx2,
    };
    return &table;
}

}  // namespace sftkit::quant
