#include "core/network.hpp"

#include "core/init.hpp"
#include "core/loss.hpp"

namespace vcnn::nn {

NetworkSpec NetworkSpec::canonical(int64_t width_divisor, bool with_batchnorm) {
    if (width_divisor < 1) raise(ErrorCode::InvalidArgument, "width_divisor must be >= 1");
    auto w = [&](int64_t c) {
        int64_t v = c / width_divisor;
        if (v < 1) raise(ErrorCode::InvalidArgument, "width_divisor leaves an empty layer");
        return v;
    };

    NetworkSpec spec;
    spec.input_edge = 48;
    spec.input_channels = 1;

    int conv_idx = 0, pool_idx = 0, bn_idx = 0;
    auto conv = [&](int64_t in, int64_t out) {
        ++conv_idx;
        spec.layers.push_back({LayerKind::Conv3d, in, out, 2, "conv3d" + std::to_string(conv_idx)});
        if (with_batchnorm) {
            ++bn_idx;
            spec.layers.push_back(
                {LayerKind::BatchNorm, out, out, 2, "batch_normalization" + std::to_string(bn_idx)});
        }
        spec.layers.push_back({LayerKind::Relu, out, out, 2, ""});
    };
    auto pool = [&] {
        ++pool_idx;
        spec.layers.push_back({LayerKind::MaxPool3d, 0, 0, 2, "max_pooling3d" + std::to_string(pool_idx)});
    };

    conv(1, w(32));
    conv(w(32), w(32));
    pool();
    conv(w(32), w(64));
    conv(w(64), w(64));
    pool();
    conv(w(64), w(128));
    conv(w(128), w(128));
    conv(w(128), w(256));
    conv(w(256), w(256));
    spec.layers.push_back({LayerKind::Flatten, 0, 0, 2, "flatten1"});
    spec.layers.push_back({LayerKind::Dense, w(256), w(256), 2, "dense1"});
    spec.layers.push_back({LayerKind::Dense, w(256), 1, 2, "dense2"});
    return spec;
}

std::vector<std::vector<int64_t>> infer_shapes(const NetworkSpec& spec) {
    // shape without batch axis: (d, h, w, c) or (features)
    std::vector<int64_t> shape{spec.input_edge, spec.input_edge, spec.input_edge, spec.input_channels};
    std::vector<std::vector<int64_t>> out;
    for (const auto& layer : spec.layers) {
        switch (layer.kind) {
            case LayerKind::Conv3d: {
                if (shape.size() != 4)
                    raise(ErrorCode::ShapeIncompatible, "conv3d needs a 4-D activation");
                if (shape[3] != layer.in_ch)
                    raise(ErrorCode::ShapeIncompatible, layer.name + ": channel mismatch");
                for (int i = 0; i < 3; ++i) {
                    if (shape[i] < 3)
                        raise(ErrorCode::ShapeIncompatible, layer.name + ": input smaller than kernel");
                    shape[i] -= 2;  // valid 3x3x3
                }
                shape[3] = layer.out_ch;
                break;
            }
            case LayerKind::BatchNorm:
            case LayerKind::Relu:
                break;
            case LayerKind::MaxPool3d: {
                if (shape.size() != 4)
                    raise(ErrorCode::ShapeIncompatible, "maxpool3d needs a 4-D activation");
                for (int i = 0; i < 3; ++i) {
                    if (shape[i] % layer.pool != 0)
                        raise(ErrorCode::ShapeIncompatible, layer.name + ": odd spatial extent");
                    shape[i] /= layer.pool;
                }
                break;
            }
            case LayerKind::Flatten: {
                int64_t features = 1;
                for (int64_t d : shape) features *= d;
                shape = {features};
                break;
            }
            case LayerKind::Dense: {
                if (shape.size() != 1)
                    raise(ErrorCode::ShapeIncompatible, layer.name + ": dense needs a flat input");
                if (shape[0] != layer.in_ch)
                    raise(ErrorCode::ShapeIncompatible, layer.name + ": feature count mismatch");
                shape = {layer.out_ch};
                break;
            }
        }
        out.push_back(shape);
    }
    if (shape != std::vector<int64_t>{1})
        raise(ErrorCode::ShapeIncompatible, "network must end in a single logit");
    return out;
}

template <typename T>
Network<T>::Network(const NetworkSpec& spec, uint64_t seed) : spec_(spec) {
    infer_shapes(spec);  // validates
    Rng rng = substream(seed, "init");
    layers_.reserve(spec.layers.size());
    for (const auto& ls : spec.layers) {
        LayerState<T> state;
        state.spec = ls;
        switch (ls.kind) {
            case LayerKind::Conv3d: {
                const int64_t k = 3;
                state.conv.weights = glorot_uniform<T>({k, k, k, ls.in_ch, ls.out_ch},
                                                       k * k * k * ls.in_ch, k * k * k * ls.out_ch, rng);
                state.conv.bias = TensorT<T>({ls.out_ch});
                break;
            }
            case LayerKind::Dense: {
                state.dense.weights =
                    glorot_uniform<T>({ls.in_ch, ls.out_ch}, ls.in_ch, ls.out_ch, rng);
                state.dense.bias = TensorT<T>({ls.out_ch});
                break;
            }
            case LayerKind::BatchNorm: {
                state.bnorm.gamma = TensorT<T>({ls.in_ch});
                for (int64_t i = 0; i < ls.in_ch; ++i) state.bnorm.gamma[i] = T(1);
                state.bnorm.beta = TensorT<T>({ls.in_ch});
                state.bnorm.running_mean = TensorT<T>({ls.in_ch});
                state.bnorm.running_var = TensorT<T>({ls.in_ch});
                for (int64_t i = 0; i < ls.in_ch; ++i) state.bnorm.running_var[i] = T(1);
                break;
            }
            default:
                break;
        }
        layers_.push_back(std::move(state));
    }
}

template <typename T>
TensorT<T> Network<T>::forward(const TensorT<T>& x, bool training, ForwardCache<T>* cache) {
    if (cache) {
        cache->inputs.clear();
        cache->inputs.reserve(layers_.size());
        cache->bnorm.assign(layers_.size(), {});
    }
    TensorT<T> cur = x;
    for (size_t i = 0; i < layers_.size(); ++i) {
        auto& layer = layers_[i];
        if (cache) cache->inputs.push_back(cur);
        switch (layer.spec.kind) {
            case LayerKind::Conv3d: cur = conv3d_forward(cur, layer.conv); break;
            case LayerKind::Relu: cur = relu_forward(cur); break;
            case LayerKind::MaxPool3d: cur = maxpool3d_forward(cur, layer.spec.pool); break;
            case LayerKind::Flatten: cur = flatten_forward(cur); break;
            case LayerKind::Dense: cur = dense_forward(cur, layer.dense); break;
            case LayerKind::BatchNorm:
                cur = batchnorm_forward(cur, layer.bnorm, training, cache ? &cache->bnorm[i] : nullptr);
                break;
        }
    }
    return cur;
}

template <typename T>
TensorT<T> Network<T>::forward_eval(const TensorT<T>& x) const {
    TensorT<T> cur = x;
    for (const auto& layer : layers_) {
        switch (layer.spec.kind) {
            case LayerKind::Conv3d: cur = conv3d_forward(cur, layer.conv); break;
            case LayerKind::Relu: cur = relu_forward(cur); break;
            case LayerKind::MaxPool3d: cur = maxpool3d_forward(cur, layer.spec.pool); break;
            case LayerKind::Flatten: cur = flatten_forward(cur); break;
            case LayerKind::Dense: cur = dense_forward(cur, layer.dense); break;
            case LayerKind::BatchNorm: {
                // Eval-mode batchnorm only reads the running moments.
                auto params = layer.bnorm;
                cur = batchnorm_forward<T>(cur, params, false, nullptr);
                break;
            }
        }
    }
    return cur;
}

template <typename T>
TensorT<T> Network<T>::predict(const TensorT<T>& x) const {
    return sigmoid_forward(forward_eval(x));
}

template <typename T>
std::vector<TensorT<T>> Network<T>::backward(const ForwardCache<T>& cache,
                                             const TensorT<T>& grad_logits) {
    if (cache.inputs.size() != layers_.size())
        raise(ErrorCode::InvalidArgument, "backward: cache does not match a training forward pass");

    std::vector<std::vector<TensorT<T>>> per_layer(layers_.size());
    TensorT<T> grad = grad_logits;
    for (size_t idx = layers_.size(); idx-- > 0;) {
        auto& layer = layers_[idx];
        const TensorT<T>& input = cache.inputs[idx];
        switch (layer.spec.kind) {
            case LayerKind::Conv3d: {
                auto g = conv3d_backward(input, layer.conv, grad);
                grad = std::move(g.x);
                per_layer[idx].push_back(std::move(g.weights));
                per_layer[idx].push_back(std::move(g.bias));
                break;
            }
            case LayerKind::Relu: grad = relu_backward(input, grad); break;
            case LayerKind::MaxPool3d: grad = maxpool3d_backward(input, grad, layer.spec.pool); break;
            case LayerKind::Flatten: grad = flatten_backward(grad, input.shape()); break;
            case LayerKind::Dense: {
                auto g = dense_backward(input, layer.dense, grad);
                grad = std::move(g.x);
                per_layer[idx].push_back(std::move(g.weights));
                per_layer[idx].push_back(std::move(g.bias));
                break;
            }
            case LayerKind::BatchNorm: {
                auto g = batchnorm_backward(input, layer.bnorm, cache.bnorm[idx], grad);
                grad = std::move(g.x);
                per_layer[idx].push_back(std::move(g.gamma));
                per_layer[idx].push_back(std::move(g.beta));
                break;
            }
        }
    }

    std::vector<TensorT<T>> grads;
    for (auto& list : per_layer)
        for (auto& g : list) grads.push_back(std::move(g));
    return grads;
}

template <typename T>
std::vector<TensorT<T>*> Network<T>::parameter_tensors() {
    std::vector<TensorT<T>*> out;
    for (auto& layer : layers_) {
        switch (layer.spec.kind) {
            case LayerKind::Conv3d:
                out.push_back(&layer.conv.weights);
                out.push_back(&layer.conv.bias);
                break;
            case LayerKind::Dense:
                out.push_back(&layer.dense.weights);
                out.push_back(&layer.dense.bias);
                break;
            case LayerKind::BatchNorm:
                out.push_back(&layer.bnorm.gamma);
                out.push_back(&layer.bnorm.beta);
                break;
            default:
                break;
        }
    }
    return out;
}

template <typename T>
std::vector<const TensorT<T>*> Network<T>::parameter_tensors() const {
    std::vector<const TensorT<T>*> out;
    for (const auto* t : const_cast<Network<T>*>(this)->parameter_tensors()) out.push_back(t);
    return out;
}

template <typename T>
int64_t Network<T>::param_count() const {
    int64_t n = 0;
    for (const auto* t : parameter_tensors()) n += t->size();
    return n;
}

template <typename T>
std::vector<LayerInfo> Network<T>::layer_table() const {
    auto shapes = infer_shapes(spec_);
    std::vector<LayerInfo> table;
    for (size_t i = 0; i < spec_.layers.size(); ++i) {
        const auto& ls = spec_.layers[i];
        LayerInfo info;
        info.out_shape = shapes[i];
        info.name = ls.name;
        switch (ls.kind) {
            case LayerKind::Conv3d:
                info.type = "Conv3D";
                info.param_count = layers_[i].conv.param_count();
                break;
            case LayerKind::MaxPool3d: info.type = "MaxPooling3D"; break;
            case LayerKind::Flatten: info.type = "Flatten"; break;
            case LayerKind::Dense:
                info.type = "Dense";
                info.param_count = layers_[i].dense.param_count();
                break;
            case LayerKind::BatchNorm:
                info.type = "BatchNorm";
                info.param_count = layers_[i].bnorm.param_count();
                break;
            case LayerKind::Relu: continue;  // folded into the owning layer
        }
        table.push_back(std::move(info));
    }
    return table;
}

template class Network<float>;
template class Network<double>;

}  // namespace vcnn::nn
