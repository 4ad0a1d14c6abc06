#pragma once

#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace vcnn::nn {

// Entries i.i.d. uniform on [-L, L], L = sqrt(6 / (fan_in + fan_out)). For
// cubic conv kernels fan_in = k^3 * in_ch and fan_out = k^3 * out_ch; dense
// layers use the feature counts directly. Biases stay zero.
double glorot_limit(int64_t fan_in, int64_t fan_out);

template <typename T>
TensorT<T> glorot_uniform(const std::vector<int64_t>& shape, int64_t fan_in, int64_t fan_out,
                          Rng& rng) {
    if (fan_in < 1 || fan_out < 1)
        raise(ErrorCode::InvalidArgument, "glorot_uniform: fans must be >= 1");
    const double limit = glorot_limit(fan_in, fan_out);
    TensorT<T> out(shape);
    const int64_t n = out.size();
    for (int64_t i = 0; i < n; ++i) out[i] = static_cast<T>(rng.uniform(-limit, limit));
    return out;
}

}  // namespace vcnn::nn
