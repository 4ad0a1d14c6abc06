#include "core/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "core/mhd.hpp"
#include "core/rng.hpp"

namespace vcnn {

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
    std::string out = "path,label,series,cx,cy,cz\n";
    char buf[512];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%s,%lld,%lld,%lld\n", e.path.c_str(), e.label,
                      e.series.c_str(), static_cast<long long>(e.corner[0]),
                      static_cast<long long>(e.corner[1]), static_cast<long long>(e.corner[2]));
        out += buf;
    }
    return out;
}

std::vector<ManifestEntry> parse_manifest(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::vector<ManifestEntry> out;
    bool saw_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != "path,label,series,cx,cy,cz")
                raise(ErrorCode::MalformedRow, "unexpected manifest header: " + line);
            saw_header = true;
            continue;
        }
        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cols.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cols.push_back(cur);
        if (cols.size() != 6)
            raise(ErrorCode::MalformedRow, "manifest line " + std::to_string(line_no) + ": need 6 columns");
        ManifestEntry e;
        e.path = cols[0];
        try {
            e.label = std::stoi(cols[1]);
            for (int i = 0; i < 3; ++i) e.corner[i] = std::stoll(cols[3 + i]);
        } catch (const std::exception&) {
            raise(ErrorCode::MalformedRow, "manifest line " + std::to_string(line_no) + ": bad number");
        }
        if (e.label != 0 && e.label != 1)
            raise(ErrorCode::MalformedRow, "manifest line " + std::to_string(line_no) + ": label must be 0/1");
        e.series = cols[2];
        out.push_back(std::move(e));
    }
    if (!saw_header) raise(ErrorCode::MalformedRow, "manifest has no header row");
    return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    std::string text = format_manifest(entries);
    write_file_bytes(path, text.data(), text.size());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    return parse_manifest(std::string(bytes.begin(), bytes.end()));
}

CubeSet load_cube_set(const std::filesystem::path& data_dir, int64_t edge) {
    auto manifest_path = data_dir / "manifest.csv";
    if (!std::filesystem::exists(manifest_path))
        raise(ErrorCode::Io, "missing manifest: " + manifest_path.string());
    auto entries = read_manifest(manifest_path);
    if (entries.empty()) raise(ErrorCode::EmptyDataset, "manifest lists no cubes");

    CubeSet set;
    set.edge = edge;
    set.samples.reserve(entries.size());
    for (const auto& e : entries) {
        CubeSample s = load_cube(data_dir / e.path, edge);
        s.label = e.label;
        s.source_series = e.series;
        s.corner_voxel = e.corner;
        set.samples.push_back(std::move(s));
    }
    return set;
}

SplitIndices split_by_series(const CubeSet& set, const SplitCounts& counts, uint64_t seed) {
    if (counts.train < 1 || counts.val < 0 || counts.test < 0)
        raise(ErrorCode::InvalidArgument, "split counts must be positive train, non-negative val/test");

    std::set<std::string> unique;
    for (const auto& s : set.samples) unique.insert(s.source_series);
    std::vector<std::string> series(unique.begin(), unique.end());  // sorted

    int64_t want = counts.train + counts.val + counts.test;
    if (want > static_cast<int64_t>(series.size()))
        raise(ErrorCode::InvalidArgument,
              "split wants " + std::to_string(want) + " scans but the dataset has " +
                  std::to_string(series.size()));

    Rng rng = substream(seed, "split");
    rng.shuffle(series);

    std::map<std::string, int> role;  // 0 train, 1 val, 2 test
    for (int64_t i = 0; i < static_cast<int64_t>(series.size()); ++i) {
        if (i < counts.train) role[series[static_cast<size_t>(i)]] = 0;
        else if (i < counts.train + counts.val) role[series[static_cast<size_t>(i)]] = 1;
        else if (i < want) role[series[static_cast<size_t>(i)]] = 2;
        else role[series[static_cast<size_t>(i)]] = -1;  // unused scans
    }

    SplitIndices idx;
    for (int64_t i = 0; i < static_cast<int64_t>(set.samples.size()); ++i) {
        switch (role[set.samples[static_cast<size_t>(i)].source_series]) {
            case 0: idx.train.push_back(i); break;
            case 1: idx.val.push_back(i); break;
            case 2: idx.test.push_back(i); break;
            default: break;
        }
    }
    return idx;
}

}  // namespace vcnn
