#include "core/mhd.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace vcnn {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

int64_t parse_int(const std::string& tok, const char* key) {
    size_t pos = 0;
    int64_t v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        raise(ErrorCode::MalformedHeader, std::string("non-integer value for ") + key);
    }
    if (pos != tok.size())
        raise(ErrorCode::MalformedHeader, std::string("non-integer value for ") + key);
    return v;
}

double parse_real(const std::string& tok, const char* key, ErrorCode code = ErrorCode::MalformedHeader) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        raise(code, std::string("non-numeric value for ") + key);
    }
    if (pos != tok.size()) raise(code, std::string("non-numeric value for ") + key);
    return v;
}

bool parse_bool(const std::string& tok) {
    return tok == "True" || tok == "true" || tok == "TRUE" || tok == "1";
}

uint16_t bswap16(uint16_t v) { return static_cast<uint16_t>((v >> 8) | (v << 8)); }
uint32_t bswap32(uint32_t v) {
    return ((v & 0xff000000u) >> 24) | ((v & 0x00ff0000u) >> 8) |
           ((v & 0x0000ff00u) << 8) | ((v & 0x000000ffu) << 24);
}

}  // namespace

const char* element_type_name(ElementType t) {
    switch (t) {
        case ElementType::Int16: return "MET_SHORT";
        case ElementType::UInt8: return "MET_UCHAR";
        case ElementType::Float32: return "MET_FLOAT";
    }
    return "?";
}

ScanMeta parse_mhd_header(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::MalformedHeader, "line without '=': " + t);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) raise(ErrorCode::MalformedHeader, "empty key in header line");
        kv[key] = value;
    }

    auto require = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            raise(ErrorCode::MalformedHeader, std::string("missing required key ") + key);
        return it->second;
    };

    if (parse_int(require("NDims"), "NDims") != 3)
        raise(ErrorCode::UnsupportedField, "NDims must be 3");

    ScanMeta meta;

    auto dims_tok = split_ws(require("DimSize"));
    if (dims_tok.size() != 3) raise(ErrorCode::MalformedHeader, "DimSize needs 3 values");
    for (int i = 0; i < 3; ++i) meta.dims[i] = parse_int(dims_tok[i], "DimSize");

    auto sp_tok = split_ws(require("ElementSpacing"));
    if (sp_tok.size() != 3) raise(ErrorCode::MalformedHeader, "ElementSpacing needs 3 values");
    for (int i = 0; i < 3; ++i) meta.spacing[i] = parse_real(sp_tok[i], "ElementSpacing");

    if (auto it = kv.find("Offset"); it != kv.end()) {
        auto off_tok = split_ws(it->second);
        if (off_tok.size() != 3) raise(ErrorCode::MalformedHeader, "Offset needs 3 values");
        for (int i = 0; i < 3; ++i) meta.origin[i] = parse_real(off_tok[i], "Offset");
    }

    const std::string& et = require("ElementType");
    if (et == "MET_SHORT") meta.element_type = ElementType::Int16;
    else if (et == "MET_UCHAR") meta.element_type = ElementType::UInt8;
    else if (et == "MET_FLOAT") meta.element_type = ElementType::Float32;
    else raise(ErrorCode::UnsupportedField, "unknown ElementType " + et);

    meta.little_endian = true;
    for (const char* key : {"BinaryDataByteOrderMSB", "ElementByteOrderMSB"})
        if (auto it = kv.find(key); it != kv.end()) meta.little_endian = !parse_bool(it->second);

    if (auto it = kv.find("CompressedData"); it != kv.end() && parse_bool(it->second))
        raise(ErrorCode::UnsupportedField, "compressed MetaImage data is not supported");

    meta.raw_path = require("ElementDataFile");
    if (meta.raw_path == "LOCAL")
        raise(ErrorCode::UnsupportedField, "ElementDataFile = LOCAL is not supported");

    meta.validate();
    return meta;
}

Volume load_raw_volume(const ScanMeta& meta, const std::vector<uint8_t>& bytes) {
    int64_t expected = meta.raw_byte_count();
    if (static_cast<int64_t>(bytes.size()) != expected) {
        raise(ErrorCode::SizeMismatch,
              "raw payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                  std::to_string(expected));
    }

    Volume v;
    v.meta = meta;
    int64_t n = meta.voxel_count();
    v.voxels.resize(static_cast<size_t>(n));

    const uint8_t* p = bytes.data();
    switch (meta.element_type) {
        case ElementType::Int16:
            for (int64_t i = 0; i < n; ++i) {
                uint16_t raw;
                std::memcpy(&raw, p + 2 * i, 2);
                if (!meta.little_endian) raw = bswap16(raw);
                v.voxels[static_cast<size_t>(i)] = static_cast<float>(static_cast<int16_t>(raw));
            }
            break;
        case ElementType::UInt8:
            for (int64_t i = 0; i < n; ++i)
                v.voxels[static_cast<size_t>(i)] = static_cast<float>(p[i]);
            break;
        case ElementType::Float32:
            for (int64_t i = 0; i < n; ++i) {
                uint32_t raw;
                std::memcpy(&raw, p + 4 * i, 4);
                if (!meta.little_endian) raw = bswap32(raw);
                float f;
                std::memcpy(&f, &raw, 4);
                if (!std::isfinite(f))
                    raise(ErrorCode::DecodeError, "non-finite voxel at index " + std::to_string(i));
                v.voxels[static_cast<size_t>(i)] = f;
            }
            break;
    }
    return v;
}

std::vector<uint8_t> encode_raw(const Volume& v) {
    int64_t n = v.meta.voxel_count();
    std::vector<uint8_t> out(static_cast<size_t>(v.meta.raw_byte_count()));
    uint8_t* p = out.data();
    switch (v.meta.element_type) {
        case ElementType::Int16:
            for (int64_t i = 0; i < n; ++i) {
                auto s = static_cast<int16_t>(std::lrint(v.voxels[static_cast<size_t>(i)]));
                uint16_t raw;
                std::memcpy(&raw, &s, 2);
                if (!v.meta.little_endian) raw = bswap16(raw);
                std::memcpy(p + 2 * i, &raw, 2);
            }
            break;
        case ElementType::UInt8:
            for (int64_t i = 0; i < n; ++i)
                p[i] = static_cast<uint8_t>(std::lrint(v.voxels[static_cast<size_t>(i)]));
            break;
        case ElementType::Float32:
            for (int64_t i = 0; i < n; ++i) {
                uint32_t raw;
                std::memcpy(&raw, &v.voxels[static_cast<size_t>(i)], 4);
                if (!v.meta.little_endian) raw = bswap32(raw);
                std::memcpy(p + 4 * i, &raw, 4);
            }
            break;
    }
    return out;
}

std::string format_mhd_header(const ScanMeta& meta) {
    char buf[512];
    std::string out;
    out += "ObjectType = Image\n";
    out += "NDims = 3\n";
    out += "BinaryData = True\n";
    out += std::string("BinaryDataByteOrderMSB = ") + (meta.little_endian ? "False" : "True") + "\n";
    out += "CompressedData = False\n";
    std::snprintf(buf, sizeof(buf), "Offset = %.17g %.17g %.17g\n", meta.origin[0], meta.origin[1],
                  meta.origin[2]);
    out += buf;
    std::snprintf(buf, sizeof(buf), "ElementSpacing = %.17g %.17g %.17g\n", meta.spacing[0],
                  meta.spacing[1], meta.spacing[2]);
    out += buf;
    std::snprintf(buf, sizeof(buf), "DimSize = %lld %lld %lld\n",
                  static_cast<long long>(meta.dims[0]), static_cast<long long>(meta.dims[1]),
                  static_cast<long long>(meta.dims[2]));
    out += buf;
    out += std::string("ElementType = ") + element_type_name(meta.element_type) + "\n";
    out += "ElementDataFile = " + meta.raw_path + "\n";
    return out;
}

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) raise(ErrorCode::Io, "read failed for " + path.string());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const void* data, size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) raise(ErrorCode::Io, "write failed for " + path.string());
}

Volume read_volume(const std::filesystem::path& mhd_path) {
    auto header_bytes = read_file_bytes(mhd_path);
    ScanMeta meta = parse_mhd_header(std::string(header_bytes.begin(), header_bytes.end()));
    meta.series_id = mhd_path.stem().string();
    auto raw_path = mhd_path.parent_path() / meta.raw_path;
    Volume v = load_raw_volume(meta, read_file_bytes(raw_path));
    v.meta.series_id = meta.series_id;
    return v;
}

void write_volume(const Volume& v, const std::filesystem::path& mhd_path) {
    Volume copy = v;
    copy.meta.raw_path = mhd_path.stem().string() + ".raw";
    std::string header = format_mhd_header(copy.meta);
    auto raw = encode_raw(copy);
    write_file_bytes(mhd_path, header.data(), header.size());
    write_file_bytes(mhd_path.parent_path() / copy.meta.raw_path, raw.data(), raw.size());
}

}  // namespace vcnn
