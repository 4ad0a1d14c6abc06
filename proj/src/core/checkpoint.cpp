#include "core/checkpoint.hpp"

#include <cstring>

#include "core/crc32.hpp"
#include "core/mhd.hpp"

namespace vcnn {

namespace {

constexpr char kMagic[4] = {'V', '3', 'D', 'C'};
constexpr uint32_t kVersion = 1;

uint8_t kind_code(nn::LayerKind kind) {
    switch (kind) {
        case nn::LayerKind::Conv3d: return 1;
        case nn::LayerKind::BatchNorm: return 2;
        case nn::LayerKind::Relu: return 3;
        case nn::LayerKind::MaxPool3d: return 4;
        case nn::LayerKind::Flatten: return 5;
        case nn::LayerKind::Dense: return 6;
    }
    raise(ErrorCode::Internal, "unknown layer kind");
}

nn::LayerKind kind_from_code(uint8_t code) {
    switch (code) {
        case 1: return nn::LayerKind::Conv3d;
        case 2: return nn::LayerKind::BatchNorm;
        case 3: return nn::LayerKind::Relu;
        case 4: return nn::LayerKind::MaxPool3d;
        case 5: return nn::LayerKind::Flatten;
        case 6: return nn::LayerKind::Dense;
    }
    raise(ErrorCode::CrcMismatch, "corrupt layer table");  // unreachable with a valid CRC
}

class Writer {
  public:
    void u8(uint8_t v) { bytes_.push_back(v); }
    void u16(uint16_t v) {
        bytes_.push_back(static_cast<uint8_t>(v & 0xff));
        bytes_.push_back(static_cast<uint8_t>(v >> 8));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void f64(double v) {
        uint64_t raw;
        std::memcpy(&raw, &v, 8);
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<uint8_t>((raw >> (8 * i)) & 0xff));
    }
    void raw(const void* data, size_t size) {
        size_t base = bytes_.size();
        bytes_.resize(base + size);
        std::memcpy(bytes_.data() + base, data, size);
    }
    void floats(const TensorT<float>& t) { raw(t.data(), static_cast<size_t>(t.size()) * 4); }

    std::vector<uint8_t> take() { return std::move(bytes_); }

  private:
    std::vector<uint8_t> bytes_;
};

class Reader {
  public:
    Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

    uint8_t u8() { return data_[need(1)]; }
    uint16_t u16() {
        size_t p = need(2);
        return static_cast<uint16_t>(data_[p] | (data_[p + 1] << 8));
    }
    uint32_t u32() {
        size_t p = need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[p + i]) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    double f64() {
        size_t p = need(8);
        uint64_t raw = 0;
        for (int i = 0; i < 8; ++i) raw |= static_cast<uint64_t>(data_[p + i]) << (8 * i);
        double v;
        std::memcpy(&v, &raw, 8);
        return v;
    }
    std::string str(size_t len) {
        size_t p = need(len);
        return std::string(reinterpret_cast<const char*>(data_ + p), len);
    }
    void floats(TensorT<float>& t) {
        size_t p = need(static_cast<size_t>(t.size()) * 4);
        std::memcpy(t.data(), data_ + p, static_cast<size_t>(t.size()) * 4);
    }
    bool exhausted() const { return pos_ == size_; }

  private:
    size_t need(size_t n) {
        if (pos_ + n > size_) raise(ErrorCode::CrcMismatch, "checkpoint shorter than its layer table");
        size_t p = pos_;
        pos_ += n;
        return p;
    }
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> encode_checkpoint(const nn::Network<float>& net,
                                       const nn::OptimizerState<float>& opt) {
    Writer w;
    w.raw(kMagic, 4);
    w.u32(kVersion);
    w.f64(opt.lr);
    w.f64(opt.momentum);
    const auto& spec = net.spec();
    w.i32(static_cast<int32_t>(spec.input_edge));
    w.i32(static_cast<int32_t>(spec.input_channels));
    w.u32(static_cast<uint32_t>(spec.layers.size()));
    for (const auto& ls : spec.layers) {
        w.u8(kind_code(ls.kind));
        w.i32(static_cast<int32_t>(ls.in_ch));
        w.i32(static_cast<int32_t>(ls.out_ch));
        w.i32(static_cast<int32_t>(ls.pool));
        w.u16(static_cast<uint16_t>(ls.name.size()));
        w.raw(ls.name.data(), ls.name.size());
    }
    for (const auto* p : net.parameter_tensors()) w.floats(*p);
    for (const auto& v : opt.velocity) w.floats(v);
    for (const auto& layer : net.layers()) {
        if (layer.spec.kind == nn::LayerKind::BatchNorm) {
            w.floats(layer.bnorm.running_mean);
            w.floats(layer.bnorm.running_var);
        }
    }
    auto bytes = w.take();
    uint32_t crc = crc32(bytes.data(), bytes.size());
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<uint8_t>((crc >> (8 * i)) & 0xff));
    return bytes;
}

Checkpoint decode_checkpoint(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        raise(ErrorCode::BadMagic, "not a checkpoint file");
    if (bytes.size() < 12) raise(ErrorCode::CrcMismatch, "checkpoint truncated");

    uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
        stored |= static_cast<uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
    if (crc32(bytes.data(), bytes.size() - 4) != stored)
        raise(ErrorCode::CrcMismatch, "checkpoint CRC mismatch (file damaged or truncated)");

    Reader r(bytes.data(), bytes.size() - 4);
    r.str(4);  // magic
    uint32_t version = r.u32();
    if (version != kVersion)
        raise(ErrorCode::VersionMismatch,
              "checkpoint format version " + std::to_string(version) + ", expected " +
                  std::to_string(kVersion));

    double lr = r.f64();
    double momentum = r.f64();

    nn::NetworkSpec spec;
    spec.input_edge = r.i32();
    spec.input_channels = r.i32();
    uint32_t layer_count = r.u32();
    for (uint32_t i = 0; i < layer_count; ++i) {
        nn::LayerSpec ls;
        ls.kind = kind_from_code(r.u8());
        ls.in_ch = r.i32();
        ls.out_ch = r.i32();
        ls.pool = r.i32();
        ls.name = r.str(r.u16());
        spec.layers.push_back(std::move(ls));
    }

    Checkpoint ckpt{nn::Network<float>(spec, 0), nn::OptimizerState<float>{}};
    ckpt.opt.lr = lr;
    ckpt.opt.momentum = momentum;

    auto params = ckpt.net.parameter_tensors();
    for (auto* p : params) r.floats(*p);
    ckpt.opt.velocity.reserve(params.size());
    for (auto* p : params) {
        TensorT<float> v(p->shape());
        r.floats(v);
        ckpt.opt.velocity.push_back(std::move(v));
    }
    for (auto& layer : ckpt.net.layers()) {
        if (layer.spec.kind == nn::LayerKind::BatchNorm) {
            r.floats(layer.bnorm.running_mean);
            r.floats(layer.bnorm.running_var);
        }
    }
    if (!r.exhausted()) raise(ErrorCode::CrcMismatch, "checkpoint has trailing bytes");
    return ckpt;
}

void save_checkpoint(const nn::Network<float>& net, const nn::OptimizerState<float>& opt,
                     const std::filesystem::path& path) {
    auto bytes = encode_checkpoint(net, opt);
    write_file_bytes(path, bytes.data(), bytes.size());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return decode_checkpoint(read_file_bytes(path));
}

}  // namespace vcnn
