#include "core/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "core/npy.hpp"

namespace vcnn {

namespace {

void copy_cube(const Volume& v, const std::array<int64_t, 3>& corner, int64_t edge,
               std::vector<float>& out) {
    out.resize(static_cast<size_t>(edge * edge * edge));
    size_t k = 0;
    for (int64_t z = 0; z < edge; ++z)
        for (int64_t y = 0; y < edge; ++y) {
            const float* row = &v.voxels[static_cast<size_t>(v.index(corner[0], corner[1] + y, corner[2] + z))];
            for (int64_t x = 0; x < edge; ++x) out[k++] = row[x];
        }
}

// Integer corners c with c < pos < c + edge, clipped to in-volume placements.
struct CornerRange {
    int64_t lo, hi;  // inclusive
    bool empty() const { return lo > hi; }
    int64_t count() const { return hi - lo + 1; }
};

CornerRange strict_corner_range(double pos, int64_t edge, int64_t dim) {
    double lo_f = std::floor(pos - static_cast<double>(edge));  // c > pos - edge
    int64_t lo = static_cast<int64_t>(lo_f) + 1;
    double hi_f = std::ceil(pos);  // c < pos
    int64_t hi = static_cast<int64_t>(hi_f) - 1;
    lo = std::max<int64_t>(lo, 0);
    hi = std::min<int64_t>(hi, dim - edge);
    return {lo, hi};
}

}  // namespace

bool center_strictly_inside(const std::array<double, 3>& voxel_pos,
                            const std::array<int64_t, 3>& corner, int64_t edge) {
    for (int i = 0; i < 3; ++i) {
        double lo = static_cast<double>(corner[i]);
        if (!(voxel_pos[i] > lo && voxel_pos[i] < lo + static_cast<double>(edge))) return false;
    }
    return true;
}

CubeSample extract_positive_cube(const Volume& v, const Annotation& a, int64_t edge, Rng& rng) {
    if (a.category != NoduleCategory::LargeNodule)
        raise(ErrorCode::InvalidArgument, "positive cubes require a large-nodule annotation");
    auto pos = world_to_voxel(v.meta, a.center_world);

    std::array<CornerRange, 3> ranges;
    for (int i = 0; i < 3; ++i) {
        if (v.meta.dims[i] < edge)
            raise(ErrorCode::NoValidPlacement, "volume smaller than the cube edge");
        ranges[i] = strict_corner_range(pos[i], edge, v.meta.dims[i]);
        if (ranges[i].empty())
            raise(ErrorCode::NoValidPlacement,
                  "nodule center admits no in-volume cube placement on axis " + std::to_string(i));
    }

    CubeSample sample;
    sample.edge = edge;
    for (int i = 0; i < 3; ++i)
        sample.corner_voxel[i] = ranges[i].lo + rng.uniform_int(ranges[i].count());
    copy_cube(v, sample.corner_voxel, edge, sample.data);
    sample.label = 1;
    sample.source_series = v.meta.series_id;
    return sample;
}

CubeSample extract_negative_cube(const Volume& v, const std::vector<Annotation>& malignant,
                                 int64_t edge, Rng& rng) {
    for (int i = 0; i < 3; ++i)
        if (v.meta.dims[i] < edge)
            raise(ErrorCode::NoValidPlacement, "volume smaller than the cube edge");

    constexpr int kMaxAttempts = 1000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::array<int64_t, 3> corner;
        for (int i = 0; i < 3; ++i) corner[i] = rng.uniform_int(v.meta.dims[i] - edge + 1);

        bool hit = false;
        for (const auto& a : malignant) {
            if (a.category != NoduleCategory::LargeNodule) continue;
            if (center_strictly_inside(world_to_voxel(v.meta, a.center_world), corner, edge)) {
                hit = true;
                break;
            }
        }
        if (hit) continue;

        CubeSample sample;
        sample.edge = edge;
        sample.corner_voxel = corner;
        copy_cube(v, corner, edge, sample.data);
        sample.label = 0;
        sample.source_series = v.meta.series_id;
        return sample;
    }
    raise(ErrorCode::NoValidPlacement, "no malignant-free cube found in 1000 attempts");
}

void save_cube(const CubeSample& sample, const std::filesystem::path& path) {
    npy_write(path, {sample.edge, sample.edge, sample.edge}, sample.data.data());
}

CubeSample load_cube(const std::filesystem::path& path, int64_t edge) {
    NpyArray arr = npy_read(path);
    std::vector<int64_t> expected{edge, edge, edge};
    if (arr.shape != expected) {
        std::string got;
        for (int64_t d : arr.shape) got += std::to_string(d) + " ";
        raise(ErrorCode::ShapeMismatch, "cube " + path.string() + " has shape ( " + got + "), expected (" +
                                            std::to_string(edge) + ")^3");
    }
    CubeSample sample;
    sample.edge = edge;
    sample.data = std::move(arr.data);
    return sample;
}

}  // namespace vcnn
