#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace sftkit::quant {

// Inner-loop kernel table. Every entry has a scalar reference
// implementation and (on x86-64 with compiler support) an AVX2 variant.
// Variants are required to be bit-identical to the scalar reference:
// identical operations per element, identical accumulation order per
// output — the equivalence suite enforces this, so callers may treat the
// backend as unobservable.
struct Kernels {
    const char* name;

    // max |x[i]| over n values (finite inputs).
    float (*absmax)(const float* x, std::size_t n);

    // codes[i] = index of the codebook level nearest to x[i]/c2, ties to
    // the lower index. cb holds 2^bits strictly increasing levels; c2 > 0.
    void (*encode_block)(const float* x, std::size_t n, float c2, const float* cb, int bits,
                         std::uint8_t* codes);

    // out[i] = cb[codes[i]] * c2.
    void (*decode_block)(const std::uint8_t* codes, std::size_t n, float c2, const float* cb,
                         float* out);

    // Row-major, overwrite. c (m×n) = a (m×k) · b (k×n). Accumulation
    // order per output element is j = 0..k-1, mul-then-add (no FMA).
    void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n);

    // c (ka×n) = aᵀ · b with a (m×ka), b (m×n); accumulation over rows
    // of a/b in order 0..m-1.
    void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m, std::size_t ka,
                    std::size_t n);
};

enum class Backend { Auto, Scalar, Avx2 };

const Kernels& scalar_kernels();
bool avx2_supported();           // CPU capability at runtime
bool avx2_compiled();            // variant built into this binary
const Kernels* avx2_kernels();   // nullptr when unavailable

// Selected once (env SFTKIT_KERNELS=scalar|avx2 overrides Auto) and
// switchable for tests. Selecting Avx2 without support throws.
const Kernels& active_kernels();
void set_backend(Backend backend);
std::string active_backend_name();

}  // namespace sftkit::quant
