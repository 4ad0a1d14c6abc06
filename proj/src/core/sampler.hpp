#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/volume.hpp"

namespace vcnn {

struct SamplerConfig {
    int64_t cube_edge = 48;
    std::array<double, 3> target_spacing{1.0, 1.0, 1.0};
    double hu_low = -1000.0;
    double hu_high = 400.0;
    uint64_t seed = 2025;
    // Cube counts per scan; the taxonomy fixes labels, these fix volume.
    int positives_per_nodule = 1;
    int negatives_per_scan = 2;

    void validate() const {
        if (cube_edge < 8) raise(ErrorCode::InvalidArgument, "cube_edge must be >= 8");
        if (!(hu_low < hu_high)) raise(ErrorCode::InvalidArgument, "hu window must satisfy low < high");
    }
};

struct CubeSample {
    std::vector<float> data;  // edge^3, values in [0,1], x-fastest
    int64_t edge = 48;
    int label = 0;  // 1 iff a malignant nodule center lies strictly inside
    std::string source_series;
    std::array<int64_t, 3> corner_voxel{0, 0, 0};
};

// True when the fractional voxel position lies strictly inside the cube at
// `corner` (faces excluded).
bool center_strictly_inside(const std::array<double, 3>& voxel_pos,
                            const std::array<int64_t, 3>& corner, int64_t edge);

// Corner uniform among placements that keep the nodule center strictly inside
// and the cube fully inside the volume. Requires a large-nodule annotation.
CubeSample extract_positive_cube(const Volume& v, const Annotation& a, int64_t edge, Rng& rng);

// Corner uniform over all in-bounds placements, rejection-resampled (at most
// 1000 attempts) until no malignant center lies strictly inside.
CubeSample extract_negative_cube(const Volume& v, const std::vector<Annotation>& malignant,
                                 int64_t edge, Rng& rng);

void save_cube(const CubeSample& sample, const std::filesystem::path& path);
// Loads voxel data from an NPY cube file; shape must be (edge, edge, edge).
CubeSample load_cube(const std::filesystem::path& path, int64_t edge);

}  // namespace vcnn
