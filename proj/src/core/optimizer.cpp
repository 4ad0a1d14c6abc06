#include "core/optimizer.hpp"

namespace vcnn::nn {

template <typename T>
void nesterov_step(const std::vector<TensorT<T>*>& params, const std::vector<TensorT<T>>& grads,
                   OptimizerState<T>& state) {
    if (params.size() != grads.size() || params.size() != state.velocity.size())
        raise(ErrorCode::ShapeMismatch, "nesterov_step: tensor list lengths differ");

    const T mu = static_cast<T>(state.momentum);
    const T lr = static_cast<T>(state.lr);
    for (size_t t = 0; t < params.size(); ++t) {
        TensorT<T>& theta = *params[t];
        const TensorT<T>& g = grads[t];
        TensorT<T>& v = state.velocity[t];
        if (!theta.same_shape(g) || !theta.same_shape(v))
            raise(ErrorCode::ShapeMismatch, "nesterov_step: shape mismatch in tensor " + std::to_string(t));
        const int64_t n = theta.size();
        for (int64_t i = 0; i < n; ++i) {
            const T step = mu * v[i] - lr * g[i];
            v[i] = step;
            theta[i] += mu * step - lr * g[i];
        }
    }
}

template void nesterov_step<float>(const std::vector<TensorT<float>*>&,
                                   const std::vector<TensorT<float>>&, OptimizerState<float>&);
template void nesterov_step<double>(const std::vector<TensorT<double>*>&,
                                    const std::vector<TensorT<double>>&, OptimizerState<double>&);

}  // namespace vcnn::nn
