#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sftkit/quant/codebook.hpp"
#include "sftkit/quant/tensor.hpp"

namespace sftkit::quant {

// Block-wise layout parameters. The tensor is cut into blocks of
// block_size elements (ragged final block allowed); each block stores
// one absmax constant; constants are themselves quantized to const_bits
// integers per group of const_group_size blocks with one full-precision
// scale per group.
struct BlockSpec {
    std::size_t block_size = 64;
    std::size_t const_group_size = 256;
    int const_bits = 8;

    void validate() const {
        if (block_size == 0) throw std::invalid_argument("block_size must be positive");
        if (const_group_size == 0) {
            throw std::invalid_argument("const_group_size must be positive");
        }
        if (const_bits < 2 || const_bits > 8) {
            throw std::invalid_argument("const_bits must lie in [2,8]");
        }
    }
};

struct QuantizedTensor {
    std::vector<std::size_t> shape;
    int codebook_bits = 8;
    BlockSpec spec;
    std::vector<std::uint8_t> codes;  // one k-bit code per element (unpacked in memory)
    std::vector<std::uint8_t> c2_q;   // quantized absmax per block
    std::vector<float> c1;            // full-precision scale per constant group

    std::size_t element_count() const {
        std::size_t n = shape.empty() ? 0 : 1;
        for (std::size_t d : shape) n *= d;
        return n;
    }
    std::size_t block_count() const {
        return (element_count() + spec.block_size - 1) / spec.block_size;
    }
    std::size_t group_count() const {
        return (block_count() + spec.const_group_size - 1) / spec.const_group_size;
    }

    void check_consistent() const;  // throws on violated invariants
};

// Per block: c2 = max|w|; codes = nearest codebook level of w/c2 (ties to
// the lower index; an all-zero block stores the zero level with c2 = 0).
// Constants are then double-quantized: per group, c1 = max c2 /
// (2^(const_bits-1) - 1) and c2_q = round(c2/c1). Throws on non-finite
// input.
QuantizedTensor quantize_blockwise(const Tensor& w, const BlockSpec& spec, const Codebook& cb);

// Fused two-stage reconstruction: constants first (c2 = c1 * c2_q), then
// elements (w = cb[code] * c2).
Tensor dequantize(const QuantizedTensor& qt, const Codebook& cb);

// The two stages exposed separately; composing them equals the fused
// call bit-exactly.
std::vector<float> dequantize_constants(const QuantizedTensor& qt);
Tensor dequantize_with_constants(const QuantizedTensor& qt, const Codebook& cb,
                                 std::span<const float> c2);

struct ErrorStats {
    double rms_error = 0.0;
    double max_abs_error = 0.0;
};

ErrorStats quant_error_stats(const Tensor& w, const QuantizedTensor& qt, const Codebook& cb);

}  // namespace sftkit::quant
