#pragma once

#include <filesystem>
#include <vector>

namespace vcnn {

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0, train_acc = 0;
    double val_loss = 0, val_acc = 0;
    double wall_seconds = 0;
};

// Appends one CSV row per epoch; a fresh file gets the header first.
void log_metrics(const EpochMetrics& m, const std::filesystem::path& path);

std::vector<EpochMetrics> read_metrics(const std::filesystem::path& path);

}  // namespace vcnn
