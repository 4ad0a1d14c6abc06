#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/volume.hpp"

namespace vcnn {

// MetaImage text header. `Key = Value` lines; key order and surrounding
// whitespace are irrelevant. Required keys: NDims, DimSize, ElementSpacing,
// ElementType, ElementDataFile. Missing Offset defaults to (0,0,0), missing
// byte-order flag to little-endian.
ScanMeta parse_mhd_header(const std::string& text);

// Decodes raw voxel bytes per meta.element_type / byte order into floats,
// x-fastest order preserved. Byte count must match the meta exactly.
Volume load_raw_volume(const ScanMeta& meta, const std::vector<uint8_t>& bytes);

// Inverse of load_raw_volume for voxel data that originated from the same
// element type; exact round trip for all supported types.
std::vector<uint8_t> encode_raw(const Volume& v);

std::string format_mhd_header(const ScanMeta& meta);

// File-level helpers. read_volume resolves the companion raw file next to the
// header; write_volume emits `<stem>.mhd` + `<stem>.raw`.
Volume read_volume(const std::filesystem::path& mhd_path);
void write_volume(const Volume& v, const std::filesystem::path& mhd_path);

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const void* data, size_t size);

}  // namespace vcnn
