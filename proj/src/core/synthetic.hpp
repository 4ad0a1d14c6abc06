#pragma once

#include <cstdint>
#include <filesystem>

#include "core/volume.hpp"

namespace vcnn {

// Desk-scale stand-in data: noisy background with optional bright spheres
// (radius 3-8 voxels, +0.3 contrast over noise sigma 0.05), fully seeded.

struct SynthDatasetReport {
    int cubes_written = 0;
    int positives = 0;
};

// Writes `n_train + n_val` labeled cubes (NPY + manifest.csv) into out_dir.
// Labels alternate sphere-present / absent; each cube is its own series so
// scan-level splits apply cleanly.
SynthDatasetReport synth_dataset(const std::filesystem::path& out_dir, int n_train, int n_val,
                                 int64_t edge, uint64_t seed);

struct SynthVolumeReport {
    std::array<double, 3> sphere_center_world{0, 0, 0};
    double sphere_diameter_mm = 0;
};

// Writes a full MET_SHORT scan (1 mm spacing, HU-encoded) with one embedded
// sphere, plus `<stem>_truth.csv` in annotation format.
SynthVolumeReport synth_volume(const std::filesystem::path& mhd_path, int64_t dim, uint64_t seed);

}  // namespace vcnn
