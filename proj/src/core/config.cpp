#include "core/config.hpp"

#include <sstream>

#include "core/mhd.hpp"

namespace vcnn {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& v, const std::string& key) {
    size_t pos = 0;
    double d = 0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        raise(ErrorCode::ConfigError, "non-numeric value for " + key);
    }
    if (pos != v.size()) raise(ErrorCode::ConfigError, "non-numeric value for " + key);
    return d;
}

int64_t to_int(const std::string& v, const std::string& key) {
    size_t pos = 0;
    int64_t i = 0;
    try {
        i = std::stoll(v, &pos);
    } catch (const std::exception&) {
        raise(ErrorCode::ConfigError, "non-integer value for " + key);
    }
    if (pos != v.size()) raise(ErrorCode::ConfigError, "non-integer value for " + key);
    return i;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    raise(ErrorCode::ConfigError, "non-boolean value for " + key);
}

}  // namespace

EngineConfig parse_config(const std::string& text) {
    EngineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            raise(ErrorCode::ConfigError, "line " + std::to_string(line_no) + " is not `key = value`");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            raise(ErrorCode::ConfigError, "line " + std::to_string(line_no) + " is not `key = value`");

        if (key == "cube_edge") cfg.sampler.cube_edge = to_int(value, key);
        else if (key == "target_spacing") {
            std::istringstream vs(value);
            double a, b, c;
            if (!(vs >> a >> b >> c)) raise(ErrorCode::ConfigError, "target_spacing needs 3 reals");
            std::string rest;
            if (vs >> rest) raise(ErrorCode::ConfigError, "target_spacing needs exactly 3 reals");
            cfg.sampler.target_spacing = {a, b, c};
        }
        else if (key == "hu_low") cfg.sampler.hu_low = to_real(value, key);
        else if (key == "hu_high") cfg.sampler.hu_high = to_real(value, key);
        else if (key == "positives_per_nodule") cfg.sampler.positives_per_nodule = static_cast<int>(to_int(value, key));
        else if (key == "negatives_per_scan") cfg.sampler.negatives_per_scan = static_cast<int>(to_int(value, key));
        else if (key == "seed") {
            cfg.sampler.seed = static_cast<uint64_t>(to_int(value, key));
            cfg.train.seed = cfg.sampler.seed;
        }
        else if (key == "batch_size") cfg.train.batch_size = static_cast<int>(to_int(value, key));
        else if (key == "epochs") cfg.train.epochs = static_cast<int>(to_int(value, key));
        else if (key == "lr") cfg.train.lr = to_real(value, key);
        else if (key == "momentum") cfg.train.momentum = to_real(value, key);
        else if (key == "train_scans") cfg.train.splits.train = to_int(value, key);
        else if (key == "val_scans") cfg.train.splits.val = to_int(value, key);
        else if (key == "test_scans") cfg.train.splits.test = to_int(value, key);
        else if (key == "checkpoint_dir") cfg.train.checkpoint_dir = value;
        else if (key == "metrics_path") cfg.train.metrics_path = value;
        else if (key == "batchnorm") cfg.train.batchnorm = to_bool(value, key);
        else if (key == "log_wall_time") cfg.train.log_wall_time = to_bool(value, key);
        else raise(ErrorCode::ConfigError, "unknown config key `" + key + "`");
    }
    cfg.sampler.validate();
    cfg.train.validate();
    return cfg;
}

EngineConfig read_config(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    return parse_config(std::string(bytes.begin(), bytes.end()));
}

}  // namespace vcnn
