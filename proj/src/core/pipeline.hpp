#pragma once

#include <filesystem>
#include <iosfwd>

#include "core/config.hpp"
#include "core/gradcheck.hpp"

namespace vcnn {

struct PreprocessReport {
    int scans_total = 0;
    int scans_ok = 0;
    int scans_failed = 0;
    int64_t positives = 0;
    int64_t negatives = 0;
    std::vector<std::pair<std::string, std::string>> errors;  // (file, message)
};

// For every .mhd scan under scans_dir: parse, resample, normalize, extract
// labeled cubes per the sampler config, and cache them as NPY + manifest rows.
// A failing scan is reported and skipped; its cubes never reach the cache.
PreprocessReport run_preprocess(const std::filesystem::path& scans_dir,
                                const std::filesystem::path& annotations_path,
                                const std::filesystem::path& out_dir, const EngineConfig& config,
                                std::ostream& log);

struct TrainOptions {
    EngineConfig config;
    bool small = false;  // width-1/4 canonical variant
};

struct TrainReport {
    int epochs_run = 0;
    double final_val_loss = 0, final_val_acc = 0;
    double best_val_loss = 0, best_val_acc = 0;
    std::filesystem::path checkpoint_path, metrics_path;
};

TrainReport run_train(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir,
                      const TrainOptions& options, std::ostream& log);

struct EvaluateReport {
    double loss = 0, accuracy = 0;
    int64_t samples = 0;
};

// split: "train", "val" or "test"; the split is reproduced from the config
// counts and seed, so they must match the preprocessing/training run.
EvaluateReport run_evaluate(const std::filesystem::path& data_dir,
                            const std::filesystem::path& checkpoint_path, const std::string& split,
                            const EngineConfig& config, std::ostream& log);

struct PredictReport {
    std::array<int64_t, 3> grid{0, 0, 0};
    int64_t windows = 0;
    int64_t detections = 0;
    std::filesystem::path detections_path;
};

PredictReport run_predict(const std::filesystem::path& scan_path,
                          const std::filesystem::path& checkpoint_path, int64_t stride,
                          double threshold, const std::filesystem::path& out_dir,
                          const EngineConfig& config, std::ostream& log);

// Prints one line per layer kind; returns the entries for the caller.
std::vector<GradCheckEntry> run_gradcheck_cmd(uint64_t seed, bool corrupt_conv, std::ostream& log);

// Prints the layer table of a checkpoint; csv switches to a machine format.
void run_inspect(const std::filesystem::path& checkpoint_path, bool csv, std::ostream& log);

std::string format_thousands(int64_t value);

}  // namespace vcnn
