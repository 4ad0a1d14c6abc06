#pragma once

#include <array>

#include "core/volume.hpp"

namespace vcnn {

// Trilinear sample at fractional voxel coordinate; out-of-bounds coordinates
// clamp to the nearest edge voxel.
float trilinear_sample(const Volume& v, double x, double y, double z);

// Output dims[i] = round(in_dims[i] * in_spacing[i] / target[i]), min 1.
// Sample points are world-aligned, origin preserved. Identity when target
// equals the source spacing.
Volume resample(const Volume& v, const std::array<double, 3>& target_spacing);

// Clamp to [low, high] then map linearly onto [0, 1].
Volume normalize(const Volume& v, double hu_low, double hu_high);

}  // namespace vcnn
