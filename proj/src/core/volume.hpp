#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace vcnn {

enum class ElementType { Int16, UInt8, Float32 };

inline int element_size(ElementType t) {
    switch (t) {
        case ElementType::Int16: return 2;
        case ElementType::UInt8: return 1;
        case ElementType::Float32: return 4;
    }
    return 0;
}

const char* element_type_name(ElementType t);  // MET_* spelling

struct ScanMeta {
    std::array<int64_t, 3> dims{0, 0, 0};        // voxels per axis, x/y/z
    std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm per voxel
    std::array<double, 3> origin{0.0, 0.0, 0.0};   // world mm of voxel (0,0,0)
    ElementType element_type = ElementType::Int16;
    bool little_endian = true;
    std::string raw_path;   // companion data file, relative to the header
    std::string series_id;  // header file stem by convention

    int64_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }
    int64_t raw_byte_count() const { return voxel_count() * element_size(element_type); }

    void validate() const {
        for (int i = 0; i < 3; ++i) {
            if (dims[i] < 1) raise(ErrorCode::MalformedHeader, "DimSize must be >= 1 on every axis");
            if (!(spacing[i] > 0.0))
                raise(ErrorCode::MalformedHeader, "ElementSpacing must be > 0 on every axis");
        }
    }
};

// 3-D scalar grid; voxels widened to float on load, x-fastest order.
struct Volume {
    ScanMeta meta;
    std::vector<float> voxels;

    int64_t index(int64_t x, int64_t y, int64_t z) const {
        return x + meta.dims[0] * (y + meta.dims[1] * z);
    }
    float at(int64_t x, int64_t y, int64_t z) const { return voxels[static_cast<size_t>(index(x, y, z))]; }
    float& at(int64_t x, int64_t y, int64_t z) { return voxels[static_cast<size_t>(index(x, y, z))]; }
};

enum class NoduleCategory { SmallNodule, LargeNodule, NonNodule };

struct Annotation {
    std::string series_id;
    std::array<double, 3> center_world{0.0, 0.0, 0.0};  // mm
    double diameter_mm = 0.0;
    NoduleCategory category = NoduleCategory::NonNodule;
};

inline std::array<double, 3> world_to_voxel(const ScanMeta& meta, const std::array<double, 3>& p) {
    return {(p[0] - meta.origin[0]) / meta.spacing[0],
            (p[1] - meta.origin[1]) / meta.spacing[1],
            (p[2] - meta.origin[2]) / meta.spacing[2]};
}

inline std::array<double, 3> voxel_to_world(const ScanMeta& meta, const std::array<double, 3>& v) {
    return {meta.origin[0] + v[0] * meta.spacing[0],
            meta.origin[1] + v[1] * meta.spacing[1],
            meta.origin[2] + v[2] * meta.spacing[2]};
}

}  // namespace vcnn
