#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "core/dataset.hpp"
#include "core/sampler.hpp"

namespace vcnn {

struct TrainConfig {
    int batch_size = 2;
    int epochs = 10;
    uint64_t seed = 2025;
    double lr = 0.003;
    double momentum = 0.9;
    SplitCounts splits;  // scans per split, disjoint by series
    std::string checkpoint_dir = ".";
    std::string metrics_path = "metrics.csv";
    bool batchnorm = false;
    bool log_wall_time = true;  // off: wall_seconds column is written as 0

    void validate() const {
        if (batch_size < 1) raise(ErrorCode::ConfigError, "batch_size must be >= 1");
        if (epochs < 0) raise(ErrorCode::ConfigError, "epochs must be >= 0");
    }
};

// Flat `key = value` file covering the sampler and trainer knobs. Unknown
// keys are errors, not warnings.
struct EngineConfig {
    SamplerConfig sampler;
    TrainConfig train;
};

EngineConfig parse_config(const std::string& text);
EngineConfig read_config(const std::filesystem::path& path);

}  // namespace vcnn
