#pragma once

#include "core/tensor.hpp"

namespace vcnn::nn {

// Numerically stable logistic function.
double sigmoid(double z);

template <typename T>
TensorT<T> sigmoid_forward(const TensorT<T>& z) {
    TensorT<T> out(z.shape());
    for (int64_t i = 0; i < z.size(); ++i) out[i] = static_cast<T>(sigmoid(static_cast<double>(z[i])));
    return out;
}

template <typename T>
struct BceResult {
    double loss;          // mean over the batch
    TensorT<T> grad_logits;  // (sigmoid(z) - y) / batch
};

// Binary cross entropy fused on the logit:
//   loss(z, y) = max(z, 0) - z*y + log(1 + exp(-|z|))
// which never evaluates log of 0 and stays finite for any magnitude.
template <typename T>
BceResult<T> bce_with_logits(const TensorT<T>& logits, const std::vector<int>& targets);

}  // namespace vcnn::nn
