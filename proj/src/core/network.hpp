#pragma once

#include <string>

#include "core/layers.hpp"
#include "core/rng.hpp"

namespace vcnn::nn {

enum class LayerKind { Conv3d, BatchNorm, Relu, MaxPool3d, Flatten, Dense };

struct LayerSpec {
    LayerKind kind;
    int64_t in_ch = 0;   // conv/dense input width, batchnorm channels
    int64_t out_ch = 0;  // conv/dense output width
    int64_t pool = 2;
    std::string name;  // display name; empty for activation-only layers
};

// Ordered layer list plus the input geometry it expects. The canonical stack
// is the full-width screening network: eight 3x3x3 convolutions with two
// interleaved 2x2x2 max-pools, flatten, a 256-wide dense layer and a single
// logit; the model output is sigmoid(logit).
struct NetworkSpec {
    std::vector<LayerSpec> layers;
    int64_t input_edge = 48;
    int64_t input_channels = 1;

    // width_divisor shrinks every channel width (the --small variant uses 4);
    // with_batchnorm inserts batchnorm between each conv and its ReLU.
    static NetworkSpec canonical(int64_t width_divisor = 1, bool with_batchnorm = false);
};

struct LayerInfo {
    std::string name;
    std::string type;                 // Conv3D / MaxPooling3D / Flatten / Dense / BatchNorm
    std::vector<int64_t> out_shape;   // without the batch axis
    int64_t param_count = 0;
};

template <typename T>
struct LayerState {
    LayerSpec spec;
    ConvParams<T> conv;
    DenseParams<T> dense;
    BatchNormParams<T> bnorm;
};

template <typename T>
struct ForwardCache {
    std::vector<TensorT<T>> inputs;  // input to each layer
    std::vector<BatchNormCache<T>> bnorm;
};

// The assembled model: parameters for every layer in spec order, Glorot
// initialized with zero biases, deterministic for a fixed seed.
template <typename T>
class Network {
  public:
    Network() = default;
    Network(const NetworkSpec& spec, uint64_t seed);

    const NetworkSpec& spec() const { return spec_; }
    std::vector<LayerState<T>>& layers() { return layers_; }
    const std::vector<LayerState<T>>& layers() const { return layers_; }

    // Logits of shape (batch, 1); cache is filled when training. Training
    // mode updates batchnorm running moments, hence non-const.
    TensorT<T> forward(const TensorT<T>& x, bool training, ForwardCache<T>* cache);

    // Eval-mode logits; batchnorm layers use their running moments.
    TensorT<T> forward_eval(const TensorT<T>& x) const;

    // Probabilities in (0, 1).
    TensorT<T> predict(const TensorT<T>& x) const;

    // Gradients for every trainable tensor, aligned with parameter_tensors().
    std::vector<TensorT<T>> backward(const ForwardCache<T>& cache, const TensorT<T>& grad_logits);

    // Trainable tensors in checkpoint order (conv: weights then bias, dense:
    // weights then bias, batchnorm: gamma then beta).
    std::vector<TensorT<T>*> parameter_tensors();
    std::vector<const TensorT<T>*> parameter_tensors() const;

    int64_t param_count() const;

    // Table rows for the displayed layers (activations are folded into the
    // owning layer, as in the reference table).
    std::vector<LayerInfo> layer_table() const;

  private:
    NetworkSpec spec_;
    std::vector<LayerState<T>> layers_;
};

// Validates shape legality and reports the activation shape after every
// layer (batch axis excluded). Raises ShapeIncompatible on a bad stack.
std::vector<std::vector<int64_t>> infer_shapes(const NetworkSpec& spec);

}  // namespace vcnn::nn
