#pragma once

#include "core/tensor.hpp"

namespace vcnn::nn {

// SGD with Nesterov momentum in the framework form:
//   v <- mu*v - lr*g ;  theta <- theta + mu*v - lr*g
// with the gradient taken at the current parameters.
template <typename T>
struct OptimizerState {
    double lr = 0.003;
    double momentum = 0.9;
    std::vector<TensorT<T>> velocity;  // mirrors the parameter tensors

    static OptimizerState for_params(const std::vector<TensorT<T>*>& params, double lr = 0.003,
                                     double momentum = 0.9) {
        OptimizerState state;
        state.lr = lr;
        state.momentum = momentum;
        state.velocity.reserve(params.size());
        for (const auto* p : params) state.velocity.emplace_back(p->shape());
        return state;
    }
};

template <typename T>
void nesterov_step(const std::vector<TensorT<T>*>& params, const std::vector<TensorT<T>>& grads,
                   OptimizerState<T>& state);

}  // namespace vcnn::nn
