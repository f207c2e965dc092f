#include "sftkit/quant/blockwise.hpp"

#include <algorithm>
#include <cmath>

#include "sftkit/quant/kernels.hpp"

namespace sftkit::quant {

void QuantizedTensor::check_consistent() const {
    spec.validate();
    if (codebook_bits < 2 || codebook_bits > 8) {
        throw std::invalid_argument("codebook_bits must lie in [2,8]");
    }
    if (codes.size() != element_count()) {
        throw std::invalid_argument("code count must equal element count");
    }
    if (c2_q.size() != block_count()) {
        throw std::invalid_argument("constant count must equal block count");
    }
    if (c1.size() != group_count()) {
        throw std::invalid_argument("scale count must equal constant group count");
    }
    const std::uint32_t code_limit = 1u << codebook_bits;
    for (std::uint8_t code : codes) {
        if (code >= code_limit) throw std::out_of_range("corrupt code >= 2^k");
    }
    const std::uint32_t const_limit = 1u << (spec.const_bits - 1);
    for (std::uint8_t q : c2_q) {
        if (q >= const_limit) throw std::out_of_range("corrupt constant exceeds const_bits range");
    }
}

QuantizedTensor quantize_blockwise(const Tensor& w, const BlockSpec& spec, const Codebook& cb) {
    spec.validate();
    for (float v : w.data) {
        if (!std::isfinite(v)) throw std::invalid_argument("input tensor must be finite");
    }

    QuantizedTensor qt;
    qt.shape = w.shape;
    qt.codebook_bits = cb.bits;
    qt.spec = spec;
    qt.codes.resize(w.data.size());

    const Kernels& kernels = active_kernels();
    const float* cb_f = cb.values_f32.data();
    const std::size_t n = w.data.size();
    const std::size_t bs = spec.block_size;
    const std::size_t blocks = qt.block_count();

    std::vector<float> c2(blocks, 0.0f);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t begin = b * bs;
        const std::size_t len = std::min(bs, n - begin);
        const float m = kernels.absmax(w.data.data() + begin, len);
        c2[b] = m;
        if (m == 0.0f) {
            std::fill_n(qt.codes.begin() + static_cast<std::ptrdiff_t>(begin), len,
                        static_cast<std::uint8_t>(cb.zero_index));
        } else {
            kernels.encode_block(w.data.data() + begin, len, m, cb_f, cb.bits,
                                 qt.codes.data() + begin);
        }
    }

    // Double quantization of the per-block constants.
    const std::size_t groups = qt.group_count();
    const float qmax = static_cast<float>((1 << (spec.const_bits - 1)) - 1);
    qt.c2_q.resize(blocks);
    qt.c1.resize(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t begin = g * spec.const_group_size;
        const std::size_t end = std::min(begin + spec.const_group_size, blocks);
        float gmax = 0.0f;
        for (std::size_t b = begin; b < end; ++b) gmax = std::max(gmax, c2[b]);
        const float scale = gmax / qmax;
        qt.c1[g] = scale;
        for (std::size_t b = begin; b < end; ++b) {
            if (scale == 0.0f) {
                qt.c2_q[b] = 0;
            } else {
                const long q = std::lround(c2[b] / scale);
                qt.c2_q[b] = static_cast<std::uint8_t>(
                    std::min<long>(q, static_cast<long>(qmax)));
            }
        }
    }
    return qt;
}

std::vector<float> dequantize_constants(const QuantizedTensor& qt) {
    const std::size_t blocks = qt.block_count();
    std::vector<float> c2(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t g = b / qt.spec.const_group_size;
        c2[b] = qt.c1[g] * static_cast<float>(qt.c2_q[b]);
    }
    return c2;
}

Tensor dequantize_with_constants(const QuantizedTensor& qt, const Codebook& cb,
                                 std::span<const float> c2) {
    if (cb.bits != qt.codebook_bits) {
        throw std::invalid_argument("codebook bits do not match the quantized tensor");
    }
    const Kernels& kernels = active_kernels();
    const std::size_t n = qt.element_count();
    const std::size_t bs = qt.spec.block_size;

    Tensor out;
    out.shape = qt.shape;
    out.data.resize(n);
    for (std::size_t b = 0; b < qt.block_count(); ++b) {
        const std::size_t begin = b * bs;
        const std::size_t len = std::min(bs, n - begin);
        kernels.decode_block(qt.codes.data() + begin, len, c2[b], cb.values_f32.data(),
                             out.data.data() + begin);
    }
    return out;
}

Tensor dequantize(const QuantizedTensor& qt, const Codebook& cb) {
    qt.check_consistent();
    const std::vector<float> c2 = dequantize_constants(qt);
    return dequantize_with_constants(qt, cb, c2);
}

ErrorStats quant_error_stats(const Tensor& w, const QuantizedTensor& qt, const Codebook& cb) {
    if (w.shape != qt.shape) {
        throw std::invalid_argument("tensor shapes do not match");
    }
    const Tensor restored = dequantize(qt, cb);
    ErrorStats stats;
    double sse = 0.0;
    for (std::size_t i = 0; i < w.data.size(); ++i) {
        const double e = static_cast<double>(w.data[i]) - static_cast<double>(restored.data[i]);
        sse += e * e;
        stats.max_abs_error = std::max(stats.max_abs_error, std::abs(e));
    }
    stats.rms_error = w.data.empty() ? 0.0 : std::sqrt(sse / static_cast<double>(w.data.size()));
    return stats;
}

}  // namespace sftkit::quant
