#include "core/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/dataset.hpp"
#include "core/mhd.hpp"
#include "core/npy.hpp"
#include "core/rng.hpp"

namespace vcnn {

namespace {

constexpr double kBackground = 0.2;
constexpr double kNoiseSigma = 0.05;
constexpr double kContrast = 0.3;
constexpr double kRadiusLo = 3.0, kRadiusHi = 8.0;

void fill_noise(std::vector<float>& voxels, Rng& rng) {
    for (auto& v : voxels)
        v = static_cast<float>(std::clamp(rng.normal(kBackground, kNoiseSigma), 0.0, 1.0));
}

void add_sphere(std::vector<float>& voxels, const std::array<int64_t, 3>& dims,
                const std::array<double, 3>& center, double radius) {
    const double r2 = radius * radius;
    int64_t zlo = std::max<int64_t>(0, static_cast<int64_t>(std::floor(center[2] - radius)));
    int64_t zhi = std::min<int64_t>(dims[2] - 1, static_cast<int64_t>(std::ceil(center[2] + radius)));
    for (int64_t z = zlo; z <= zhi; ++z) {
        double dz = static_cast<double>(z) - center[2];
        for (int64_t y = std::max<int64_t>(0, static_cast<int64_t>(std::floor(center[1] - radius)));
             y <= std::min<int64_t>(dims[1] - 1, static_cast<int64_t>(std::ceil(center[1] + radius))); ++y) {
            double dy = static_cast<double>(y) - center[1];
            for (int64_t x = std::max<int64_t>(0, static_cast<int64_t>(std::floor(center[0] - radius)));
                 x <= std::min<int64_t>(dims[0] - 1, static_cast<int64_t>(std::ceil(center[0] + radius)));
                 ++x) {
                double dx = static_cast<double>(x) - center[0];
                if (dx * dx + dy * dy + dz * dz <= r2) {
                    auto& v = voxels[static_cast<size_t>(x + dims[0] * (y + dims[1] * z))];
                    v = static_cast<float>(std::min(1.0, static_cast<double>(v) + kContrast));
                }
            }
        }
    }
}

}  // namespace

SynthDatasetReport synth_dataset(const std::filesystem::path& out_dir, int n_train, int n_val,
                                 int64_t edge, uint64_t seed) {
    if (n_train < 1 || n_val < 0)
        raise(ErrorCode::InvalidArgument, "synth_dataset needs at least one training cube");
    std::filesystem::create_directories(out_dir);

    const int total = n_train + n_val;
    std::vector<ManifestEntry> manifest;
    SynthDatasetReport report;

    std::array<int64_t, 3> dims{edge, edge, edge};
    for (int i = 0; i < total; ++i) {
        Rng rng = substream(seed, "synth", static_cast<uint64_t>(i));
        std::vector<float> voxels(static_cast<size_t>(edge * edge * edge));
        fill_noise(voxels, rng);

        int label = (i % 2 == 0) ? 1 : 0;
        if (label == 1) {
            double radius = rng.uniform(kRadiusLo, kRadiusHi);
            std::array<double, 3> center;
            for (int a = 0; a < 3; ++a)
                center[a] = rng.uniform(radius + 2.0, static_cast<double>(edge) - radius - 2.0);
            add_sphere(voxels, dims, center, radius);
            ++report.positives;
        }

        char name[64];
        std::snprintf(name, sizeof(name), "synth_%04d", i);
        std::string filename = std::string(name) + "_0.npy";
        npy_write(out_dir / filename, {edge, edge, edge}, voxels.data());

        ManifestEntry e;
        e.path = filename;
        e.label = label;
        e.series = name;
        manifest.push_back(std::move(e));
        ++report.cubes_written;
    }
    write_manifest(out_dir / "manifest.csv", manifest);
    return report;
}

SynthVolumeReport synth_volume(const std::filesystem::path& mhd_path, int64_t dim, uint64_t seed) {
    if (dim < 16) raise(ErrorCode::InvalidArgument, "synthetic volume dimension too small");

    Volume v;
    v.meta.dims = {dim, dim, dim};
    v.meta.spacing = {1.0, 1.0, 1.0};
    v.meta.origin = {-100.0, -100.0, -100.0};
    v.meta.element_type = ElementType::Int16;
    v.meta.series_id = mhd_path.stem().string();
    v.voxels.resize(static_cast<size_t>(v.meta.voxel_count()));

    Rng rng = substream(seed, "synth-volume");
    fill_noise(v.voxels, rng);

    double radius = rng.uniform(kRadiusLo, kRadiusHi);
    std::array<double, 3> center;
    for (int a = 0; a < 3; ++a)
        center[a] = rng.uniform(static_cast<double>(dim) * 0.25, static_cast<double>(dim) * 0.75);
    add_sphere(v.voxels, v.meta.dims, center, radius);

    // Store as HU so the standard preprocessing window maps it back to [0,1].
    for (auto& x : v.voxels) x = -1000.0f + x * 1400.0f;
    write_volume(v, mhd_path);

    SynthVolumeReport report;
    report.sphere_center_world = voxel_to_world(v.meta, center);
    report.sphere_diameter_mm = 2.0 * radius;

    char row[256];
    std::snprintf(row, sizeof(row), "seriesuid,coordX,coordY,coordZ,diameter_mm\n%s,%.9g,%.9g,%.9g,%.9g\n",
                  v.meta.series_id.c_str(), report.sphere_center_world[0],
                  report.sphere_center_world[1], report.sphere_center_world[2],
                  report.sphere_diameter_mm);
    auto truth_path = mhd_path.parent_path() / (mhd_path.stem().string() + "_truth.csv");
    write_file_bytes(truth_path, row, std::string(row).size());
    return report;
}

}  // namespace vcnn
