#include "core/init.hpp"

#include <cmath>

namespace vcnn::nn {

double glorot_limit(int64_t fan_in, int64_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace vcnn::nn
