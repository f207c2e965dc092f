#pragma once

#include "sftkit/quant/blockwise.hpp"
#include "sftkit/quant/codebook.hpp"
#include "sftkit/quant/tensor.hpp"

namespace sftkit::quant {

// Trainable low-rank factor pair. l1: in_features x rank,
// l2: rank x out_features. No alpha/rank scale factor is applied — the
// adapter contributes X * L1 * L2 as-is.
struct LoraAdapter {
    Matrix l1;
    Matrix l2;
    int rank = 8;

    static LoraAdapter zeros(std::size_t in_features, std::size_t out_features, int rank);
};

// One linear layer: a frozen block-quantized weight plus the trainable
// adapter. The quantized container has no gradient path — there is no
// API that produces dW.
struct QuantLinear {
    QuantizedTensor w_q;  // shape (in_features, out_features)
    Codebook codebook;
    LoraAdapter adapter;

    std::size_t in_features() const { return w_q.shape.at(0); }
    std::size_t out_features() const { return w_q.shape.at(1); }

    // Quantizes w (in x out) at `bits` and attaches a zero-initialized
    // rank-`rank` adapter.
    static QuantLinear from_weights(const Matrix& w, const BlockSpec& spec, int bits, int rank);

    // The dense weight the layer currently realizes:
    // dequantize(w_q) + l1*l2, in double. Used by oracles and reporting.
    Matrix materialize() const;
};

// y (batch x out) = x * dequant(w_q) + (x * l1) * l2, computed in double
// with the adapter term added after the base term.
Matrix forward(const QuantLinear& layer, const Matrix& x);

// Gradients flow only into the adapter:
//   d_l2 = (x*l1)ᵀ * dy
//   d_l1 = xᵀ * (dy * l2ᵀ)
struct AdapterGrads {
    Matrix d_l1;
    Matrix d_l2;
};

AdapterGrads adapter_grads(const QuantLinear& layer, const Matrix& x, const Matrix& dy);

// Double-precision view of a dequantized tensor (2-D only).
Matrix to_matrix(const Tensor& t);

}  // namespace sftkit::quant
