#include "sftkit/quant/linear.hpp"

#include <stdexcept>

#include "sftkit/quant/kernels.hpp"

namespace sftkit::quant {

LoraAdapter LoraAdapter::zeros(std::size_t in_features, std::size_t out_features, int rank) {
    if (rank < 1) throw std::invalid_argument("adapter rank must be positive");
    LoraAdapter a;
    a.rank = rank;
    a.l1 = Matrix(in_features, static_cast<std::size_t>(rank));
    a.l2 = Matrix(static_cast<std::size_t>(rank), out_features);
    return a;
}

QuantLinear QuantLinear::from_weights(const Matrix& w, const BlockSpec& spec, int bits,
                                      int rank) {
    QuantLinear layer;
    layer.codebook = build_nf_codebook(bits);
    Tensor wt;
    wt.shape = {w.rows, w.cols};
    wt.data.reserve(w.data.size());
    for (double v : w.data) wt.data.push_back(static_cast<float>(v));
    layer.w_q = quantize_blockwise(wt, spec, layer.codebook);
    layer.adapter = LoraAdapter::zeros(w.rows, w.cols, rank);
    return layer;
}

Matrix to_matrix(const Tensor& t) {
    if (t.shape.size() != 2) throw std::invalid_argument("expected a 2-D tensor");
    Matrix m(t.shape[0], t.shape[1]);
    for (std::size_t i = 0; i < t.data.size(); ++i) m.data[i] = static_cast<double>(t.data[i]);
    return m;
}

namespace {

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matrix shape mismatch in multiply");
    Matrix c(a.rows, b.cols);
    active_kernels().gemm_nn(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.cols);
    return c;
}

// aᵀ * b for a (m x ka), b (m x n).
Matrix multiply_t(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) throw std::invalid_argument("matrix shape mismatch in multiply_t");
    Matrix c(a.cols, b.cols);
    active_kernels().gemm_tn(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.cols);
    return c;
}

void check_layer_shapes(const QuantLinear& layer) {
    if (layer.w_q.shape.size() != 2) {
        throw std::invalid_argument("quantized weight must be 2-D");
    }
    if (layer.adapter.l1.rows != layer.in_features() ||
        layer.adapter.l1.cols != static_cast<std::size_t>(layer.adapter.rank) ||
        layer.adapter.l2.rows != static_cast<std::size_t>(layer.adapter.rank) ||
        layer.adapter.l2.cols != layer.out_features()) {
        throw std::invalid_argument("adapter factors do not conform to the weight shape");
    }
}

}  // namespace

Matrix QuantLinear::materialize() const {
    check_layer_shapes(*this);
    Matrix w = to_matrix(dequantize(w_q, codebook));
    const Matrix delta = multiply(adapter.l1, adapter.l2);
    for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] += delta.data[i];
    return w;
}

Matrix forward(const QuantLinear& layer, const Matrix& x) {
    check_layer_shapes(layer);
    if (x.cols != layer.in_features()) {
        throw std::invalid_argument("input features do not match the layer");
    }
    const Matrix w = to_matrix(dequantize(layer.w_q, layer.codebook));
    Matrix y = multiply(x, w);                       // base term
    const Matrix h = multiply(x, layer.adapter.l1);  // batch x rank
    const Matrix a = multiply(h, layer.adapter.l2);  // batch x out
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += a.data[i];
    return y;
}

AdapterGrads adapter_grads(const QuantLinear& layer, const Matrix& x, const Matrix& dy) {
    check_layer_shapes(layer);
    if (x.cols != layer.in_features()) {
        throw std::invalid_argument("input features do not match the layer");
    }
    if (dy.rows != x.rows || dy.cols != layer.out_features()) {
        throw std::invalid_argument("upstream gradient shape does not match the layer");
    }
    AdapterGrads grads;
    const Matrix h = multiply(x, layer.adapter.l1);       // batch x rank
    grads.d_l2 = multiply_t(h, dy);                       // rank x out
    const Matrix g = multiply(dy, layer.adapter.l2.transposed());  // batch x rank
    grads.d_l1 = multiply_t(x, g);                        // in x rank
    return grads;
}

}  // namespace sftkit::quant
