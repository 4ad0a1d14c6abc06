#include "core/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "core/mhd.hpp"

namespace vcnn {

int64_t window_positions(int64_t dim, int64_t cube_edge, int64_t stride) {
    int64_t span = dim - cube_edge;
    return (span + stride - 1) / stride + 1;  // ceil + 1; 1 when span == 0
}

int64_t DetectionMask::popcount() const {
    int64_t n = 0;
    for (uint8_t c : cells) n += c != 0;
    return n;
}

ProbabilityMap sliding_window_predict(const Volume& v, const nn::Network<float>& net, int64_t stride) {
    if (stride < 1) raise(ErrorCode::InvalidArgument, "stride must be >= 1");
    const int64_t edge = net.spec().input_edge;
    for (int i = 0; i < 3; ++i) {
        if (v.meta.dims[i] < edge)
            raise(ErrorCode::VolumeTooSmall,
                  "volume axis " + std::to_string(i) + " is smaller than the " + std::to_string(edge) +
                      "-voxel window");
        if (stride > v.meta.dims[i])
            raise(ErrorCode::VolumeTooSmall,
                  "stride " + std::to_string(stride) + " exceeds the volume extent on axis " +
                      std::to_string(i));
    }

    ProbabilityMap map;
    map.stride = stride;
    map.cube_edge = edge;
    map.origin_meta = v.meta;
    for (int i = 0; i < 3; ++i) map.grid[i] = window_positions(v.meta.dims[i], edge, stride);
    map.probs.assign(static_cast<size_t>(map.grid[0] * map.grid[1] * map.grid[2]), 0.0f);

    for (int64_t iz = 0; iz < map.grid[2]; ++iz) {
        for (int64_t iy = 0; iy < map.grid[1]; ++iy) {
            for (int64_t ix = 0; ix < map.grid[0]; ++ix) {
                const int64_t cx = map.corner(0, ix), cy = map.corner(1, iy), cz = map.corner(2, iz);
                Tensor cube({1, edge, edge, edge, 1});
                float* dst = cube.data();
                size_t k = 0;
                for (int64_t z = 0; z < edge; ++z)
                    for (int64_t y = 0; y < edge; ++y) {
                        const float* row = &v.voxels[static_cast<size_t>(v.index(cx, cy + y, cz + z))];
                        std::memcpy(dst + k, row, static_cast<size_t>(edge) * sizeof(float));
                        k += static_cast<size_t>(edge);
                    }
                Tensor prob = net.predict(cube);
                map.probs[static_cast<size_t>(map.index(ix, iy, iz))] = prob[0];
            }
        }
    }
    return map;
}

DetectionMask threshold_map(const ProbabilityMap& m, double t) {
    if (!(t > 0.0 && t < 1.0)) raise(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
    DetectionMask mask;
    mask.grid = m.grid;
    mask.threshold = t;
    mask.cells.resize(m.probs.size());
    for (size_t i = 0; i < m.probs.size(); ++i)
        mask.cells[i] = m.probs[i] >= static_cast<float>(t) ? 1 : 0;
    return mask;
}

DetectionMask denoise(const DetectionMask& mask) {
    DetectionMask out = mask;
    const auto& g = mask.grid;
    for (int64_t z = 0; z < g[2]; ++z) {
        for (int64_t y = 0; y < g[1]; ++y) {
            for (int64_t x = 0; x < g[0]; ++x) {
                if (!mask.at(x, y, z)) continue;
                bool keep = (x > 0 && mask.at(x - 1, y, z)) || (x + 1 < g[0] && mask.at(x + 1, y, z)) ||
                            (y > 0 && mask.at(x, y - 1, z)) || (y + 1 < g[1] && mask.at(x, y + 1, z)) ||
                            (z > 0 && mask.at(x, y, z - 1)) || (z + 1 < g[2] && mask.at(x, y, z + 1));
                if (!keep) out.cells[static_cast<size_t>(out.index(x, y, z))] = 0;
            }
        }
    }
    return out;
}

Projection project_2d(const std::array<int64_t, 3>& grid, const std::vector<float>& values, int axis) {
    if (axis < 0 || axis > 2) raise(ErrorCode::InvalidArgument, "projection axis must be 0, 1 or 2");
    // remaining axes in (row, col) order: project z -> rows y, cols x
    int a_row, a_col;
    if (axis == 0) { a_row = 2; a_col = 1; }
    else if (axis == 1) { a_row = 2; a_col = 0; }
    else { a_row = 1; a_col = 0; }

    Projection p;
    p.rows = grid[static_cast<size_t>(a_row)];
    p.cols = grid[static_cast<size_t>(a_col)];
    p.values.assign(static_cast<size_t>(p.rows * p.cols), 0.0f);

    std::array<int64_t, 3> idx{};
    for (int64_t r = 0; r < p.rows; ++r) {
        for (int64_t c = 0; c < p.cols; ++c) {
            float best = 0.0f;
            for (int64_t a = 0; a < grid[static_cast<size_t>(axis)]; ++a) {
                idx[static_cast<size_t>(axis)] = a;
                idx[static_cast<size_t>(a_row)] = r;
                idx[static_cast<size_t>(a_col)] = c;
                float v = values[static_cast<size_t>(idx[0] + grid[0] * (idx[1] + grid[1] * idx[2]))];
                best = std::max(best, v);
            }
            p.values[static_cast<size_t>(r * p.cols + c)] = best;
        }
    }
    return p;
}

Projection project_2d(const DetectionMask& m, int axis) {
    std::vector<float> values(m.cells.size());
    for (size_t i = 0; i < m.cells.size(); ++i) values[i] = m.cells[i] ? 1.0f : 0.0f;
    return project_2d(m.grid, values, axis);
}

std::vector<Detection> mask_to_world(const DetectionMask& mask, const ProbabilityMap& map) {
    if (mask.grid != map.grid) raise(ErrorCode::ShapeMismatch, "mask and map grids differ");
    std::vector<Detection> out;
    for (int64_t z = 0; z < mask.grid[2]; ++z) {
        for (int64_t y = 0; y < mask.grid[1]; ++y) {
            for (int64_t x = 0; x < mask.grid[0]; ++x) {
                if (!mask.at(x, y, z)) continue;
                Detection d;
                d.cell = {x, y, z};
                std::array<double, 3> center_voxel{
                    static_cast<double>(map.corner(0, x)) + static_cast<double>(map.cube_edge) / 2.0,
                    static_cast<double>(map.corner(1, y)) + static_cast<double>(map.cube_edge) / 2.0,
                    static_cast<double>(map.corner(2, z)) + static_cast<double>(map.cube_edge) / 2.0};
                d.center_world = voxel_to_world(map.origin_meta, center_voxel);
                d.probability = map.at(x, y, z);
                out.push_back(d);
            }
        }
    }
    return out;
}

void write_map_csv(const ProbabilityMap& m, const std::filesystem::path& path) {
    std::string text = "ix,iy,iz,probability\n";
    char buf[128];
    for (int64_t z = 0; z < m.grid[2]; ++z)
        for (int64_t y = 0; y < m.grid[1]; ++y)
            for (int64_t x = 0; x < m.grid[0]; ++x) {
                std::snprintf(buf, sizeof(buf), "%lld,%lld,%lld,%.9g\n", static_cast<long long>(x),
                              static_cast<long long>(y), static_cast<long long>(z),
                              static_cast<double>(m.at(x, y, z)));
                text += buf;
            }
    write_file_bytes(path, text.data(), text.size());
}

void write_map_raw(const ProbabilityMap& m, const std::filesystem::path& raw_path,
                   const std::filesystem::path& sidecar_path) {
    write_file_bytes(raw_path, m.probs.data(), m.probs.size() * sizeof(float));
    char buf[256];
    std::snprintf(buf, sizeof(buf), "grid = %lld %lld %lld\nstride = %lld\ncube_edge = %lld\n",
                  static_cast<long long>(m.grid[0]), static_cast<long long>(m.grid[1]),
                  static_cast<long long>(m.grid[2]), static_cast<long long>(m.stride),
                  static_cast<long long>(m.cube_edge));
    write_file_bytes(sidecar_path, buf, std::strlen(buf));
}

void write_detections_csv(const std::vector<Detection>& detections,
                          const std::filesystem::path& path) {
    std::string text = "ix,iy,iz,world_x,world_y,world_z,probability\n";
    char buf[256];
    for (const auto& d : detections) {
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%lld,%.9g,%.9g,%.9g,%.9g\n",
                      static_cast<long long>(d.cell[0]), static_cast<long long>(d.cell[1]),
                      static_cast<long long>(d.cell[2]), d.center_world[0], d.center_world[1],
                      d.center_world[2], static_cast<double>(d.probability));
        text += buf;
    }
    write_file_bytes(path, text.data(), text.size());
}

void write_projection_pgm(const Projection& p, const std::filesystem::path& path) {
    char header[64];
    std::snprintf(header, sizeof(header), "P5\n%lld %lld\n255\n", static_cast<long long>(p.cols),
                  static_cast<long long>(p.rows));
    std::vector<uint8_t> bytes(header, header + std::strlen(header));
    for (int64_t r = 0; r < p.rows; ++r)
        for (int64_t c = 0; c < p.cols; ++c) {
            float v = std::clamp(p.at(r, c), 0.0f, 1.0f);
            bytes.push_back(static_cast<uint8_t>(std::lrint(v * 255.0f)));
        }
    write_file_bytes(path, bytes.data(), bytes.size());
}

void write_projection_csv(const Projection& p, const std::filesystem::path& path) {
    std::string text;
    char buf[64];
    for (int64_t r = 0; r < p.rows; ++r) {
        for (int64_t c = 0; c < p.cols; ++c) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(p.at(r, c)));
            text += buf;
            if (c + 1 < p.cols) text += ',';
        }
        text += '\n';
    }
    write_file_bytes(path, text.data(), text.size());
}

}  // namespace vcnn
