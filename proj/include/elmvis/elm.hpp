#pragma once

// Extreme learning machine core: a random fixed hidden layer plus the
// SVD-based least-squares machinery (pseudoinverse, hat matrix, output
// weights) that the swap criterion is built on.

#include "elmvis/common.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <utility>

namespace elmvis {

enum class Activation { Sigmoid, Tanh, Linear };

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Linear: return "linear";
    }
    return "?";
}

// Random hidden layer. Weights and bias are drawn once and never change;
// all training happens in the linear output layer.
class ElmModel {
public:
    ElmModel() = default;
    ElmModel(Matrix weights, Vector bias, Activation activation)
        : weights_(std::move(weights)), bias_(std::move(bias)), activation_(activation) {
        if (weights_.cols() != bias_.size())
            throw ArgumentError("ElmModel: weight columns must match bias length");
        if (!weights_.allFinite() || !bias_.allFinite())
            throw NumericError("ElmModel: non-finite weights or bias");
    }

    Index input_dim() const { return weights_.rows(); }
    Index neurons() const { return weights_.cols(); }
    Activation activation() const { return activation_; }
    const Matrix& weights() const { return weights_; }
    const Vector& bias() const { return bias_; }
    bool empty() const { return weights_.size() == 0; }

private:
    Matrix weights_;           // d_in x L
    Vector bias_;              // L
    Activation activation_ = Activation::Tanh;
};

// Draws a model with entries W ~ N(0, 1/d_in) and bias ~ N(0, 1).
// The 1/sqrt(d_in) scaling keeps pre-activations O(1) for any input width.
// Weights fill in column-major order, then the bias; a fixed seed gives a
// bitwise-identical model on the same platform.
inline ElmModel init_model(Index d_in, Index neurons, Activation activation, std::uint64_t seed) {
    if (d_in < 1)
        throw ArgumentError("init_model: input dimension must be >= 1");
    if (neurons < 1)
        throw ArgumentError("init_model: neuron count must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));

    Matrix w(d_in, neurons);
    for (Index j = 0; j < neurons; ++j)
        for (Index i = 0; i < d_in; ++i)
            w(i, j) = scale * normal(rng);
    Vector b(neurons);
    for (Index j = 0; j < neurons; ++j)
        b(j) = normal(rng);

    return ElmModel(std::move(w), std::move(b), activation);
}

// H[i,j] = phi(sum_k V[i,k] W[k,j] + bias[j]), phi applied element-wise.
inline Matrix hidden_layer(const ElmModel& model, const Matrix& inputs) {
    if (inputs.cols() != model.input_dim())
        throw ArgumentError("hidden_layer: input width does not match model input dimension");

    Matrix h = inputs * model.weights();
    h.rowwise() += model.bias().transpose();
    switch (model.activation()) {
        case Activation::Sigmoid:
            h = h.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
            break;
        case Activation::Tanh:
            h = h.unaryExpr([](double z) { return std::tanh(z); });
            break;
        case Activation::Linear:
            break;
    }
    return h;
}

namespace detail {

// Thin SVD with relative truncation: singular values <= rcond * sigma_max
// are treated as zero.
struct TruncatedSvd {
    Matrix u;          // n x r
    Matrix v;          // m x r
    Vector inv_sigma;  // r
    Index rank = 0;
};

inline TruncatedSvd truncated_svd(const Matrix& h, double rcond) {
    if (!h.allFinite())
        throw NumericError("svd: matrix has non-finite entries");
    if (!(rcond > 0.0))
        throw ArgumentError("svd: rcond must be positive");

    Eigen::BDCSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = sigma.size() > 0 ? rcond * sigma(0) : 0.0;

    Index r = 0;
    while (r < sigma.size() && sigma(r) > cutoff)
        ++r;

    TruncatedSvd out;
    out.rank = r;
    out.u = svd.matrixU().leftCols(r);
    out.v = svd.matrixV().leftCols(r);
    out.inv_sigma = sigma.head(r).cwiseInverse();
    return out;
}

} // namespace detail

// Moore-Penrose pseudoinverse via SVD with relative cutoff rcond.
inline Matrix pseudoinverse(const Matrix& h, double rcond = 1e-9) {
    auto svd = detail::truncated_svd(h, rcond);
    return svd.v * svd.inv_sigma.asDiagonal() * svd.u.transpose();
}

// Count of singular values above the rcond cutoff.
inline Index numerical_rank(const Matrix& h, double rcond = 1e-9) {
    return detail::truncated_svd(h, rcond).rank;
}

// Hat matrix A = H H^+, the operator mapping targets to their least-squares
// predictions. Built as U_r U_r^T from the truncated SVD, which is the same
// operator and symmetric/idempotent to machine precision.
inline Matrix projection_matrix(const Matrix& h, double rcond = 1e-9) {
    auto svd = detail::truncated_svd(h, rcond);
    return svd.u * svd.u.transpose();
}

// Minimum-norm least-squares output weights, beta = H^+ X.
inline Matrix solve_output_weights(const Matrix& h, const Matrix& x, double rcond = 1e-9) {
    if (h.rows() != x.rows())
        throw ArgumentError("solve_output_weights: H and X row counts differ");
    auto svd = detail::truncated_svd(h, rcond);
    return svd.v * (svd.inv_sigma.asDiagonal() * (svd.u.transpose() * x));
}

} // namespace elmvis
