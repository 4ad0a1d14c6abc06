#pragma once

#include <cstdint>
#include <vector>

#include "core/tensor.hpp"

namespace vcnn::nn {

using vcnn::TensorT;

// Activations are (batch, depth, height, width, channels), channels fastest.
// All convolutions are valid (no padding), stride 1, cubic kernels.

template <typename T>
struct ConvParams {
    TensorT<T> weights;  // (k, k, k, in_ch, out_ch)
    TensorT<T> bias;     // (out_ch)

    int64_t k() const { return weights.dim(0); }
    int64_t in_ch() const { return weights.dim(3); }
    int64_t out_ch() const { return weights.dim(4); }
    int64_t param_count() const { return weights.size() + bias.size(); }
};

template <typename T>
struct DenseParams {
    TensorT<T> weights;  // (in_features, out_features)
    TensorT<T> bias;     // (out_features)

    int64_t in_features() const { return weights.dim(0); }
    int64_t out_features() const { return weights.dim(1); }
    int64_t param_count() const { return weights.size() + bias.size(); }
};

template <typename T>
struct BatchNormParams {
    TensorT<T> gamma, beta;              // (channels), trainable
    TensorT<T> running_mean, running_var;  // (channels), inference moments
    double momentum = 0.99;
    double eps = 1e-5;

    int64_t channels() const { return gamma.dim(0); }
    int64_t param_count() const { return gamma.size() + beta.size(); }
};

template <typename T>
struct ConvGrads {
    TensorT<T> x, weights, bias;
};

template <typename T>
struct DenseGrads {
    TensorT<T> x, weights, bias;
};

template <typename T>
struct BatchNormGrads {
    TensorT<T> x, gamma, beta;
};

template <typename T>
struct BatchNormCache {
    TensorT<T> x_hat;
    std::vector<T> inv_std;  // per channel
};

// out[b,d,h,w,o] = bias[o] + sum over the k^3 window and input channels.
// Output spatial extent is in - k + 1 per axis.
template <typename T>
TensorT<T> conv3d_forward(const TensorT<T>& x, const ConvParams<T>& p);

template <typename T>
ConvGrads<T> conv3d_backward(const TensorT<T>& x, const ConvParams<T>& p, const TensorT<T>& upstream);

// Disjoint 2x2x2 blocks per channel; spatial dims must be even. Backward
// routes each upstream value to the argmax cell, first encountered in
// x-fastest order on ties.
template <typename T>
TensorT<T> maxpool3d_forward(const TensorT<T>& x, int64_t pool = 2);

template <typename T>
TensorT<T> maxpool3d_backward(const TensorT<T>& x, const TensorT<T>& upstream, int64_t pool = 2);

// Gradient at exactly 0 is defined as 0.
template <typename T>
TensorT<T> relu_forward(const TensorT<T>& x);

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& x, const TensorT<T>& upstream);

// y = xW + b over (batch, features) inputs.
template <typename T>
TensorT<T> dense_forward(const TensorT<T>& x, const DenseParams<T>& p);

template <typename T>
DenseGrads<T> dense_backward(const TensorT<T>& x, const DenseParams<T>& p, const TensorT<T>& upstream);

// (batch, ...) -> (batch, product); backward is the inverse reshape. The data
// order is preserved exactly.
template <typename T>
TensorT<T> flatten_forward(const TensorT<T>& x);

template <typename T>
TensorT<T> flatten_backward(const TensorT<T>& upstream, const std::vector<int64_t>& input_shape);

// Per-channel standardization over batch+spatial axes, then scale/shift.
// Training mode uses batch moments and updates the running ones; inference
// mode standardizes with the running moments. Training requires at least two
// values per channel.
template <typename T>
TensorT<T> batchnorm_forward(const TensorT<T>& x, BatchNormParams<T>& p, bool training,
                             BatchNormCache<T>* cache);

template <typename T>
BatchNormGrads<T> batchnorm_backward(const TensorT<T>& x, const BatchNormParams<T>& p,
                                     const BatchNormCache<T>& cache, const TensorT<T>& upstream);

}  // namespace vcnn::nn
