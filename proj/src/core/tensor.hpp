#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "core/error.hpp"

namespace vcnn {

// Dense N-dimensional array, last axis fastest. Activations use the 5-D
// layout (batch, depth, height, width, channels).
template <typename T>
class TensorT {
  public:
    TensorT() = default;

    explicit TensorT(std::vector<int64_t> shape) : shape_(std::move(shape)) {
        data_.assign(static_cast<size_t>(compute_size(shape_)), T(0));
    }

    TensorT(std::vector<int64_t> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (static_cast<int64_t>(data_.size()) != compute_size(shape_))
            raise(ErrorCode::ShapeMismatch, "tensor data length does not match shape");
    }

    static int64_t compute_size(const std::vector<int64_t>& shape) {
        int64_t n = 1;
        for (int64_t d : shape) {
            if (d <= 0) raise(ErrorCode::ShapeMismatch, "tensor dimensions must be positive");
            n *= d;
        }
        return n;
    }

    const std::vector<int64_t>& shape() const { return shape_; }
    int64_t dim(size_t axis) const { return shape_.at(axis); }
    int64_t size() const { return static_cast<int64_t>(data_.size()); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    const T& operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

    // Reshape without touching data; total size must be preserved.
    TensorT reshaped(std::vector<int64_t> shape) const {
        if (compute_size(shape) != size())
            raise(ErrorCode::ShapeMismatch, "reshape changes element count");
        return TensorT(std::move(shape), data_);
    }

    template <typename U>
    TensorT<U> cast() const {
        std::vector<U> out(data_.size());
        for (size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
        return TensorT<U>(shape_, std::move(out));
    }

    bool all_finite() const {
        for (T v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

  private:
    std::vector<int64_t> shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

}  // namespace vcnn
