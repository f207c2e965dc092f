#include <doctest.h>

#include <cmath>

#include "sftkit/quant/linear.hpp"
#include "sftkit/quant/serialize.hpp"
#include "support/oracles.hpp"

using namespace sftkit::quant;

namespace {

double max_relative_diff(const Matrix& a, const Matrix& b) {
    REQUIRE(a.rows == b.rows);
    REQUIRE(a.cols == b.cols);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double denom = std::max({std::abs(a.data[i]), std::abs(b.data[i]), 1e-12});
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]) / denom);
    }
    return worst;
}

QuantLinear random_layer(std::size_t in, std::size_t out, int rank, std::uint64_t seed) {
    QuantLinear layer = QuantLinear::from_weights(oracles::gaussian_matrix(in, out, seed),
                                                  BlockSpec{16, 4, 8}, 8, rank);
    layer.adapter.l1 = oracles::gaussian_matrix(in, static_cast<std::size_t>(rank), seed + 1, 0.3);
    layer.adapter.l2 = oracles::gaussian_matrix(static_cast<std::size_t>(rank), out, seed + 2, 0.3);
    return layer;
}

// ½‖forward(x)‖², the scalar loss behind the finite-difference checks.
double half_squared_norm(const QuantLinear& layer, const Matrix& x) {
    const Matrix y = forward(layer, x);
    double total = 0.0;
    for (double v : y.data) total += v * v;
    return 0.5 * total;
}

}  // namespace

TEST_SUITE("quant.linear") {

TEST_CASE("zero adapter: output equals the dequantized base exactly") {
    QuantLinear layer = QuantLinear::from_weights(oracles::gaussian_matrix(8, 6, 10),
                                                  BlockSpec{16, 4, 8}, 8, 4);
    const Matrix x = oracles::gaussian_matrix(3, 8, 11);
    const Matrix y = forward(layer, x);
    const Matrix w = to_matrix(dequantize(layer.w_q, layer.codebook));
    Matrix expected(3, 6);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 8; ++k) acc += x.at(i, k) * w.at(k, j);
            expected.at(i, j) = acc;
        }
    }
    CHECK(max_relative_diff(y, expected) == 0.0);
}

TEST_CASE("zero base: output equals the adapter product exactly") {
    Matrix zero_w(8, 6);
    QuantLinear layer = QuantLinear::from_weights(zero_w, BlockSpec{16, 4, 8}, 8, 2);
    layer.adapter.l1 = oracles::gaussian_matrix(8, 2, 21);
    layer.adapter.l2 = oracles::gaussian_matrix(2, 6, 22);
    const Matrix x = oracles::gaussian_matrix(4, 8, 23);

    const Matrix y = forward(layer, x);
    Matrix h(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t r = 0; r < 2; ++r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 8; ++k) acc += x.at(i, k) * layer.adapter.l1.at(k, r);
            h.at(i, r) = acc;
        }
    }
    Matrix expected(4, 6);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < 2; ++r) acc += h.at(i, r) * layer.adapter.l2.at(r, j);
            expected.at(i, j) = acc;
        }
    }
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        CHECK(y.data[i] == doctest::Approx(expected.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("forward matches the dense-materialization oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        QuantLinear layer = random_layer(8, 8, 2, 100 + seed * 7);
        const Matrix x = oracles::gaussian_matrix(4, 8, 200 + seed);
        const Matrix y = forward(layer, x);

        // Oracle: materialize dequant(W) + L1*L2 densely, then multiply.
        const Matrix w_full = layer.materialize();
        Matrix expected(x.rows, w_full.cols);
        for (std::size_t i = 0; i < x.rows; ++i) {
            for (std::size_t j = 0; j < w_full.cols; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < x.cols; ++k) acc += x.at(i, k) * w_full.at(k, j);
                expected.at(i, j) = acc;
            }
        }
        CHECK(max_relative_diff(y, expected) < 1e-6);
    }
}

TEST_CASE("shape mismatches are rejected") {
    QuantLinear layer = random_layer(8, 6, 2, 300);
    CHECK_THROWS_AS(forward(layer, Matrix(3, 7)), std::invalid_argument);
    CHECK_THROWS_AS(adapter_grads(layer, Matrix(3, 8), Matrix(2, 6)), std::invalid_argument);
    CHECK_THROWS_AS(adapter_grads(layer, Matrix(3, 8), Matrix(3, 5)), std::invalid_argument);
}

TEST_CASE("zero upstream gradient produces zero adapter gradients") {
    QuantLinear layer = random_layer(6, 5, 3, 400);
    const Matrix x = oracles::gaussian_matrix(2, 6, 401);
    const AdapterGrads grads = adapter_grads(layer, x, Matrix(2, 5));
    for (double v : grads.d_l1.data) CHECK(v == 0.0);
    for (double v : grads.d_l2.data) CHECK(v == 0.0);
}

TEST_CASE("scalar layer reduces to the closed-form products") {
    // All dims 1: y = x*(w + l1*l2); upstream dy.
    // d_l1 = x*dy*l2, d_l2 = (x*l1)*dy.
    QuantLinear layer = QuantLinear::from_weights(Matrix(1, 1, {0.5}), BlockSpec{4, 2, 8}, 8, 1);
    layer.adapter.l1 = Matrix(1, 1, {0.25});
    layer.adapter.l2 = Matrix(1, 1, {-0.75});
    const Matrix x(1, 1, {2.0});
    const Matrix dy(1, 1, {3.0});
    const AdapterGrads grads = adapter_grads(layer, x, dy);
    CHECK(grads.d_l1.at(0, 0) == doctest::Approx(2.0 * 3.0 * -0.75).epsilon(1e-15));
    CHECK(grads.d_l2.at(0, 0) == doctest::Approx(2.0 * 0.25 * 3.0).epsilon(1e-15));
}

TEST_CASE("adapter gradients match central finite differences of the ½‖Y‖² loss") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        QuantLinear layer = random_layer(5 + seed % 3, 4 + seed % 2, 2, 500 + seed * 13);
        const Matrix x = oracles::gaussian_matrix(3, layer.in_features(), 600 + seed);

        // dL = Y for this loss.
        const Matrix y = forward(layer, x);
        const AdapterGrads grads = adapter_grads(layer, x, y);

        const double h = 1e-5;
        for (std::size_t i = 0; i < layer.adapter.l1.data.size(); ++i) {
            const double numeric = oracles::central_difference(
                [&] { return half_squared_norm(layer, x); }, layer.adapter.l1.data[i], h);
            const double analytic = grads.d_l1.data[i];
            const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
            CHECK(std::abs(numeric - analytic) / denom < 1e-4);
        }
        for (std::size_t i = 0; i < layer.adapter.l2.data.size(); ++i) {
            const double numeric = oracles::central_difference(
                [&] { return half_squared_norm(layer, x); }, layer.adapter.l2.data[i], h);
            const double analytic = grads.d_l2.data[i];
            const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
            CHECK(std::abs(numeric - analytic) / denom < 1e-4);
        }
    }
}

TEST_CASE("backward pass leaves the frozen quantized weight untouched") {
    QuantLinear layer = random_layer(8, 8, 2, 700);
    const auto before = serialize(layer.w_q);
    const Matrix x = oracles::gaussian_matrix(4, 8, 701);
    const Matrix y = forward(layer, x);
    (void)adapter_grads(layer, x, y);
    CHECK(serialize(layer.w_q) == before);
}

}  // TEST_SUITE
