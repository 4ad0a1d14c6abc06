#pragma once

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/metrics.hpp"
#include "core/network.hpp"
#include "core/optimizer.hpp"

namespace vcnn {

struct EvalResult {
    double loss = 0.0;  // mean over samples
    double accuracy = 0.0;  // threshold 0.5
};

// Batch tensor (n, e, e, e, 1) for the given sample indices.
Tensor make_batch(const CubeSet& set, const std::vector<int64_t>& indices, size_t begin, size_t end);

// One pass over `indices`: shuffled with the epoch substream of `seed`,
// batches of config.batch_size (short final batch included), forward, BCE,
// backward, Nesterov update per batch. Returns mean loss over samples and
// accuracy at threshold 0.5.
EvalResult train_epoch(nn::Network<float>& net, nn::OptimizerState<float>& opt, const CubeSet& set,
                       const std::vector<int64_t>& indices, int batch_size, uint64_t seed, int epoch);

// Pure: no parameter mutation, deterministic.
EvalResult evaluate(const nn::Network<float>& net, const CubeSet& set,
                    const std::vector<int64_t>& indices, int batch_size);

struct FitResult {
    std::vector<EpochMetrics> history;
    double best_val_loss = 0.0;
    std::filesystem::path checkpoint_path;
};

// Full training run: epoch loop with metrics CSV appends and
// best-validation-loss checkpoint retention. With zero epochs the initial
// model is checkpointed and only the CSV header is written.
FitResult fit(nn::Network<float>& net, const CubeSet& set, const SplitIndices& split,
              const TrainConfig& config, const std::filesystem::path& out_dir);

}  // namespace vcnn
