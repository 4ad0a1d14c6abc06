#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vcnn {

// NPY version 1.0, dtype '<f4', C order. Write-then-read is bit-exact.
std::vector<uint8_t> npy_encode(const std::vector<int64_t>& shape, const float* data);

struct NpyArray {
    std::vector<int64_t> shape;
    std::vector<float> data;
};

NpyArray npy_decode(const std::vector<uint8_t>& bytes);

void npy_write(const std::filesystem::path& path, const std::vector<int64_t>& shape, const float* data);
NpyArray npy_read(const std::filesystem::path& path);

}  // namespace vcnn
