#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/sampler.hpp"

namespace vcnn {

// Cube cache manifest: `path,label,series,cx,cy,cz`, paths relative to the
// manifest's directory.
struct ManifestEntry {
    std::string path;
    int label = 0;
    std::string series;
    std::array<int64_t, 3> corner{0, 0, 0};
};

std::string format_manifest(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> parse_manifest(const std::string& csv_text);

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// In-memory training set: cubes in manifest order.
struct CubeSet {
    std::vector<CubeSample> samples;
    int64_t edge = 48;
};

CubeSet load_cube_set(const std::filesystem::path& data_dir, int64_t edge);

// Scan-level split: unique series ids are sorted, shuffled with the split
// substream of `seed`, and dealt train-then-val-then-test. The splits never
// share a series. Requested counts must not exceed the series count.
struct SplitCounts {
    int64_t train = 720, val = 80, test = 88;
};

struct SplitIndices {
    std::vector<int64_t> train, val, test;
};

SplitIndices split_by_series(const CubeSet& set, const SplitCounts& counts, uint64_t seed);

}  // namespace vcnn
