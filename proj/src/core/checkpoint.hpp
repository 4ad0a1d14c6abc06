#pragma once

#include <filesystem>

#include "core/network.hpp"
#include "core/optimizer.hpp"

namespace vcnn {

// Checkpoint layout (all integers little-endian):
//   magic "V3DC" | u32 version | f64 lr | f64 momentum
//   i32 input_edge | i32 input_channels | u32 layer_count
//   per layer: u8 kind | i32 in_ch | i32 out_ch | i32 pool | u16 name_len | name
//   f32 parameter arrays in layer order (weights then bias per layer)
//   f32 velocity arrays in the same order
//   f32 batchnorm running mean/var pairs, when present
//   u32 CRC-32 of everything before it
// Save -> load -> save is byte-identical.
struct Checkpoint {
    nn::Network<float> net;
    nn::OptimizerState<float> opt;
};

std::vector<uint8_t> encode_checkpoint(const nn::Network<float>& net,
                                       const nn::OptimizerState<float>& opt);
Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes);

void save_checkpoint(const nn::Network<float>& net, const nn::OptimizerState<float>& opt,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vcnn
