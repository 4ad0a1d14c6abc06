#pragma once

#include <filesystem>

#include "core/network.hpp"
#include "core/volume.hpp"

namespace vcnn {

// Per-window malignancy probabilities across a preprocessed volume. Window
// corners advance by `stride` per axis with a final flush to the far edge, so
// the grid extent is ceil((dims - edge) / stride) + 1; the divisible case
// reduces to floor((dims - edge) / stride) + 1.
struct ProbabilityMap {
    std::array<int64_t, 3> grid{0, 0, 0};
    std::vector<float> probs;  // x-fastest
    int64_t stride = 24;
    int64_t cube_edge = 48;
    ScanMeta origin_meta;

    int64_t index(int64_t ix, int64_t iy, int64_t iz) const {
        return ix + grid[0] * (iy + grid[1] * iz);
    }
    float at(int64_t ix, int64_t iy, int64_t iz) const {
        return probs[static_cast<size_t>(index(ix, iy, iz))];
    }
    // Corner voxel of the window at grid cell i along an axis (flush-aware).
    int64_t corner(int axis, int64_t i) const {
        return std::min(i * stride, origin_meta.dims[static_cast<size_t>(axis)] - cube_edge);
    }
};

struct DetectionMask {
    std::array<int64_t, 3> grid{0, 0, 0};
    std::vector<uint8_t> cells;
    double threshold = 0.9;

    int64_t index(int64_t ix, int64_t iy, int64_t iz) const {
        return ix + grid[0] * (iy + grid[1] * iz);
    }
    bool at(int64_t ix, int64_t iy, int64_t iz) const {
        return cells[static_cast<size_t>(index(ix, iy, iz))] != 0;
    }
    int64_t popcount() const;
};

struct Detection {
    std::array<int64_t, 3> cell{0, 0, 0};
    std::array<double, 3> center_world{0, 0, 0};  // mm
    float probability = 0;
};

int64_t window_positions(int64_t dim, int64_t cube_edge, int64_t stride);

// Volume must already be resampled + normalized, and at least cube_edge wide
// on every axis (and wider than the stride).
ProbabilityMap sliding_window_predict(const Volume& v, const nn::Network<float>& net, int64_t stride);

// Inclusive comparison: cell set iff probability >= t, t in (0, 1).
DetectionMask threshold_map(const ProbabilityMap& m, double t);

// A set cell survives iff at least one 6-connected neighbor is set; applied
// once. Output is always a subset of the input.
DetectionMask denoise(const DetectionMask& mask);

// Maximum-intensity projection along the given axis (0=x, 1=y, 2=z);
// result indexed [row][col] over the two remaining axes.
struct Projection {
    int64_t rows = 0, cols = 0;
    std::vector<float> values;
    float at(int64_t r, int64_t c) const { return values[static_cast<size_t>(r * cols + c)]; }
};

Projection project_2d(const std::array<int64_t, 3>& grid, const std::vector<float>& values, int axis);
inline Projection project_2d(const ProbabilityMap& m, int axis) { return project_2d(m.grid, m.probs, axis); }
Projection project_2d(const DetectionMask& m, int axis);

// Surviving cells mapped to cube-center world coordinates.
std::vector<Detection> mask_to_world(const DetectionMask& mask, const ProbabilityMap& map);

// File emitters (formats documented in the README).
void write_map_csv(const ProbabilityMap& m, const std::filesystem::path& path);
void write_map_raw(const ProbabilityMap& m, const std::filesystem::path& raw_path,
                   const std::filesystem::path& sidecar_path);
void write_detections_csv(const std::vector<Detection>& detections, const std::filesystem::path& path);
void write_projection_pgm(const Projection& p, const std::filesystem::path& path);
void write_projection_csv(const Projection& p, const std::filesystem::path& path);

}  // namespace vcnn
