#include "core/resample.hpp"

#include <algorithm>
#include <cmath>

#include "core/parallel.hpp"

namespace vcnn {

float trilinear_sample(const Volume& v, double x, double y, double z) {
    const auto& d = v.meta.dims;
    x = std::clamp(x, 0.0, static_cast<double>(d[0] - 1));
    y = std::clamp(y, 0.0, static_cast<double>(d[1] - 1));
    z = std::clamp(z, 0.0, static_cast<double>(d[2] - 1));

    int64_t x0 = static_cast<int64_t>(x), y0 = static_cast<int64_t>(y), z0 = static_cast<int64_t>(z);
    int64_t x1 = std::min(x0 + 1, d[0] - 1);
    int64_t y1 = std::min(y0 + 1, d[1] - 1);
    int64_t z1 = std::min(z0 + 1, d[2] - 1);
    float fx = static_cast<float>(x - static_cast<double>(x0));
    float fy = static_cast<float>(y - static_cast<double>(y0));
    float fz = static_cast<float>(z - static_cast<double>(z0));

    float c000 = v.at(x0, y0, z0), c100 = v.at(x1, y0, z0);
    float c010 = v.at(x0, y1, z0), c110 = v.at(x1, y1, z0);
    float c001 = v.at(x0, y0, z1), c101 = v.at(x1, y0, z1);
    float c011 = v.at(x0, y1, z1), c111 = v.at(x1, y1, z1);

    float c00 = c000 + (c100 - c000) * fx;
    float c10 = c010 + (c110 - c010) * fx;
    float c01 = c001 + (c101 - c001) * fx;
    float c11 = c011 + (c111 - c011) * fx;
    float c0 = c00 + (c10 - c00) * fy;
    float c1 = c01 + (c11 - c01) * fy;
    return c0 + (c1 - c0) * fz;
}

Volume resample(const Volume& v, const std::array<double, 3>& target_spacing) {
    for (double s : target_spacing)
        if (!(s > 0.0)) raise(ErrorCode::InvalidArgument, "target spacing must be > 0");

    if (target_spacing == v.meta.spacing) return v;

    Volume out;
    out.meta = v.meta;
    out.meta.spacing = target_spacing;
    out.meta.element_type = ElementType::Float32;
    for (int i = 0; i < 3; ++i) {
        double extent = static_cast<double>(v.meta.dims[i]) * v.meta.spacing[i];
        out.meta.dims[i] = std::max<int64_t>(1, std::llround(extent / target_spacing[i]));
    }
    out.voxels.resize(static_cast<size_t>(out.meta.voxel_count()));

    const auto& od = out.meta.dims;
    // Source coordinate of output voxel j: world = origin + j*target, so the
    // source-grid position is j*target/spacing per axis.
    double rx = target_spacing[0] / v.meta.spacing[0];
    double ry = target_spacing[1] / v.meta.spacing[1];
    double rz = target_spacing[2] / v.meta.spacing[2];

    parallel_for(od[2], [&](int64_t z_begin, int64_t z_end) {
        for (int64_t z = z_begin; z < z_end; ++z)
            for (int64_t y = 0; y < od[1]; ++y)
                for (int64_t x = 0; x < od[0]; ++x)
                    out.at(x, y, z) = trilinear_sample(v, x * rx, y * ry, z * rz);
    });
    return out;
}

Volume normalize(const Volume& v, double hu_low, double hu_high) {
    if (!(hu_low < hu_high)) raise(ErrorCode::InvalidArgument, "hu window must satisfy low < high");
    Volume out;
    out.meta = v.meta;
    out.meta.element_type = ElementType::Float32;
    out.voxels.resize(v.voxels.size());
    float lo = static_cast<float>(hu_low);
    float hi = static_cast<float>(hu_high);
    float span = hi - lo;
    // Division keeps the endpoints exact: (hi - lo) / span == 1.0f.
    for (size_t i = 0; i < v.voxels.size(); ++i) {
        float x = std::clamp(v.voxels[i], lo, hi);
        out.voxels[i] = (x - lo) / span;
    }
    return out;
}

}  // namespace vcnn
