#include "core/npy.hpp"

#include <cstring>
#include <string>

#include "core/error.hpp"
#include "core/mhd.hpp"

namespace vcnn {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::string shape_tuple(const std::vector<int64_t>& shape) {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        s += std::to_string(shape[i]);
        if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
        if (i + 1 < shape.size()) s += " ";
    }
    s += ")";
    return s;
}

// Minimal parser for the literal dict the format mandates.
std::string dict_value(const std::string& header, const std::string& key) {
    std::string needle = "'" + key + "':";
    size_t pos = header.find(needle);
    if (pos == std::string::npos)
        raise(ErrorCode::MalformedNpy, "header missing key " + key);
    pos += needle.size();
    while (pos < header.size() && header[pos] == ' ') ++pos;
    size_t end = pos;
    if (pos < header.size() && header[pos] == '\'') {
        end = header.find('\'', pos + 1);
        if (end == std::string::npos) raise(ErrorCode::MalformedNpy, "unterminated string in header");
        return header.substr(pos + 1, end - pos - 1);
    }
    if (pos < header.size() && header[pos] == '(') {
        end = header.find(')', pos);
        if (end == std::string::npos) raise(ErrorCode::MalformedNpy, "unterminated tuple in header");
        return header.substr(pos, end - pos + 1);
    }
    while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
    return header.substr(pos, end - pos);
}

}  // namespace

std::vector<uint8_t> npy_encode(const std::vector<int64_t>& shape, const float* data) {
    std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape_tuple(shape) + ", }";
    size_t unpadded = 6 + 2 + 2 + header.size() + 1;  // magic, version, hlen, dict, '\n'
    size_t padded = (unpadded + 63) / 64 * 64;
    header.append(padded - unpadded, ' ');
    header += '\n';

    int64_t count = 1;
    for (int64_t d : shape) count *= d;

    std::vector<uint8_t> out;
    out.reserve(padded + static_cast<size_t>(count) * 4);
    out.insert(out.end(), kMagic, kMagic + 6);
    out.push_back(1);
    out.push_back(0);
    auto hlen = static_cast<uint16_t>(header.size());
    out.push_back(static_cast<uint8_t>(hlen & 0xff));
    out.push_back(static_cast<uint8_t>(hlen >> 8));
    out.insert(out.end(), header.begin(), header.end());
    size_t payload = static_cast<size_t>(count) * 4;
    size_t base = out.size();
    out.resize(base + payload);
    std::memcpy(out.data() + base, data, payload);
    return out;
}

NpyArray npy_decode(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0)
        raise(ErrorCode::MalformedNpy, "bad NPY magic");
    if (bytes[6] != 1 || bytes[7] != 0)
        raise(ErrorCode::MalformedNpy, "unsupported NPY version");
    uint16_t hlen = static_cast<uint16_t>(bytes[8] | (bytes[9] << 8));
    if (bytes.size() < 10u + hlen) raise(ErrorCode::MalformedNpy, "truncated NPY header");
    std::string header(bytes.begin() + 10, bytes.begin() + 10 + hlen);

    if (dict_value(header, "descr") != "<f4")
        raise(ErrorCode::MalformedNpy, "unsupported dtype, expected <f4");
    if (dict_value(header, "fortran_order") != "False")
        raise(ErrorCode::MalformedNpy, "fortran order arrays are not supported");

    std::string tup = dict_value(header, "shape");
    NpyArray arr;
    std::string num;
    for (size_t i = 1; i < tup.size(); ++i) {
        char c = tup[i];
        if (c == ',' || c == ')') {
            if (!num.empty()) {
                arr.shape.push_back(std::stoll(num));
                num.clear();
            }
        } else if (c != ' ') {
            num += c;
        }
    }

    int64_t count = 1;
    for (int64_t d : arr.shape) {
        if (d <= 0) raise(ErrorCode::MalformedNpy, "non-positive dimension in shape");
        count *= d;
    }
    size_t expected = 10u + hlen + static_cast<size_t>(count) * 4;
    if (bytes.size() != expected)
        raise(ErrorCode::MalformedNpy, "payload size does not match declared shape");

    arr.data.resize(static_cast<size_t>(count));
    std::memcpy(arr.data.data(), bytes.data() + 10 + hlen, static_cast<size_t>(count) * 4);
    return arr;
}

void npy_write(const std::filesystem::path& path, const std::vector<int64_t>& shape, const float* data) {
    auto bytes = npy_encode(shape, data);
    write_file_bytes(path, bytes.data(), bytes.size());
}

NpyArray npy_read(const std::filesystem::path& path) {
    return npy_decode(read_file_bytes(path));
}

}  // namespace vcnn
