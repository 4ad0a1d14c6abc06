#include "core/loss.hpp"

#include <algorithm>
#include <cmath>

namespace vcnn::nn {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

template <typename T>
BceResult<T> bce_with_logits(const TensorT<T>& logits, const std::vector<int>& targets) {
    const int64_t batch = logits.size();
    if (batch != static_cast<int64_t>(targets.size()))
        raise(ErrorCode::ShapeMismatch, "bce_with_logits: target count mismatch");
    if (batch == 0) raise(ErrorCode::InvalidArgument, "bce_with_logits: empty batch");
    for (int y : targets)
        if (y != 0 && y != 1) raise(ErrorCode::InvalidArgument, "bce_with_logits: targets must be 0/1");

    BceResult<T> result{0.0, TensorT<T>(logits.shape())};
    double total = 0.0;
    for (int64_t i = 0; i < batch; ++i) {
        double z = static_cast<double>(logits[i]);
        double y = targets[static_cast<size_t>(i)];
        total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
        result.grad_logits[i] = static_cast<T>((sigmoid(z) - y) / static_cast<double>(batch));
    }
    result.loss = total / static_cast<double>(batch);
    return result;
}

template BceResult<float> bce_with_logits<float>(const TensorT<float>&, const std::vector<int>&);
template BceResult<double> bce_with_logits<double>(const TensorT<double>&, const std::vector<int>&);

}  // namespace vcnn::nn
