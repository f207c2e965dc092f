#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sftkit::quant {

// Dense float tensor; quantization storage precision.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<float> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (element_count() != data.size()) {
            throw std::invalid_argument("tensor shape does not match data size");
        }
    }

    std::size_t element_count() const {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }
};

// Row-major double matrix; compute precision for the linear-layer math.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> d)
        : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != rows * cols) {
            throw std::invalid_argument("matrix dimensions do not match data size");
        }
    }

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    Matrix transposed() const {
        Matrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        }
        return t;
    }

    bool operator==(const Matrix&) const = default;
};

}  // namespace sftkit::quant
