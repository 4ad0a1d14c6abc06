#include "core/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <fstream>
#include <limits>

#include "core/checkpoint.hpp"
#include "core/loss.hpp"

namespace vcnn {

Tensor make_batch(const CubeSet& set, const std::vector<int64_t>& indices, size_t begin, size_t end) {
    const int64_t n = static_cast<int64_t>(end - begin);
    const int64_t e = set.edge;
    Tensor batch({n, e, e, e, 1});
    const size_t cube_floats = static_cast<size_t>(e * e * e);
    for (size_t i = begin; i < end; ++i) {
        const auto& s = set.samples[static_cast<size_t>(indices[i])];
        std::memcpy(batch.data() + (i - begin) * cube_floats, s.data.data(), cube_floats * sizeof(float));
    }
    return batch;
}

namespace {

std::vector<int> batch_labels(const CubeSet& set, const std::vector<int64_t>& indices, size_t begin,
                              size_t end) {
    std::vector<int> labels;
    labels.reserve(end - begin);
    for (size_t i = begin; i < end; ++i)
        labels.push_back(set.samples[static_cast<size_t>(indices[i])].label);
    return labels;
}

void tally(const Tensor& probs, const std::vector<int>& labels, double loss, size_t count,
           double& loss_sum, int64_t& correct) {
    loss_sum += loss * static_cast<double>(count);
    for (size_t i = 0; i < count; ++i) {
        int predicted = probs[static_cast<int64_t>(i)] >= 0.5f ? 1 : 0;
        if (predicted == labels[i]) ++correct;
    }
}

}  // namespace

EvalResult train_epoch(nn::Network<float>& net, nn::OptimizerState<float>& opt, const CubeSet& set,
                       const std::vector<int64_t>& indices, int batch_size, uint64_t seed, int epoch) {
    if (indices.empty()) raise(ErrorCode::EmptyDataset, "train_epoch: no samples");

    std::vector<int64_t> order = indices;
    Rng rng = substream(seed, "shuffle", static_cast<uint64_t>(epoch));
    rng.shuffle(order);

    auto params = net.parameter_tensors();
    double loss_sum = 0.0;
    int64_t correct = 0;

    for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(batch_size)) {
        size_t end = std::min(order.size(), begin + static_cast<size_t>(batch_size));
        Tensor x = make_batch(set, order, begin, end);
        auto labels = batch_labels(set, order, begin, end);

        nn::ForwardCache<float> cache;
        Tensor logits = net.forward(x, true, &cache);
        auto bce = nn::bce_with_logits(logits, labels);
        auto grads = net.backward(cache, bce.grad_logits);
        nn::nesterov_step(params, grads, opt);

        Tensor probs = nn::sigmoid_forward(logits);
        tally(probs, labels, bce.loss, end - begin, loss_sum, correct);
    }

    return {loss_sum / static_cast<double>(order.size()),
            static_cast<double>(correct) / static_cast<double>(order.size())};
}

EvalResult evaluate(const nn::Network<float>& net, const CubeSet& set,
                    const std::vector<int64_t>& indices, int batch_size) {
    if (indices.empty()) raise(ErrorCode::EmptyDataset, "evaluate: no samples");

    double loss_sum = 0.0;
    int64_t correct = 0;
    for (size_t begin = 0; begin < indices.size(); begin += static_cast<size_t>(batch_size)) {
        size_t end = std::min(indices.size(), begin + static_cast<size_t>(batch_size));
        Tensor x = make_batch(set, indices, begin, end);
        auto labels = batch_labels(set, indices, begin, end);
        Tensor logits = net.forward_eval(x);
        auto bce = nn::bce_with_logits(logits, labels);
        Tensor probs = nn::sigmoid_forward(logits);
        tally(probs, labels, bce.loss, end - begin, loss_sum, correct);
    }
    return {loss_sum / static_cast<double>(indices.size()),
            static_cast<double>(correct) / static_cast<double>(indices.size())};
}

FitResult fit(nn::Network<float>& net, const CubeSet& set, const SplitIndices& split,
              const TrainConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);

    FitResult result;
    result.checkpoint_path = out_dir / "best.ckpt";
    auto metrics_path = out_dir / config.metrics_path;

    // Fresh run: an existing metrics file would corrupt the epoch log.
    std::filesystem::remove(metrics_path);
    if (config.epochs == 0) {
        // Header-only metrics plus the initial model.
        std::ofstream header(metrics_path);
        header << "epoch,train_loss,train_acc,val_loss,val_acc,wall_seconds\n";
        auto opt = nn::OptimizerState<float>::for_params(net.parameter_tensors(), config.lr,
                                                         config.momentum);
        save_checkpoint(net, opt, result.checkpoint_path);
        return result;
    }

    auto opt = nn::OptimizerState<float>::for_params(net.parameter_tensors(), config.lr, config.momentum);
    double best_val = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        auto started = std::chrono::steady_clock::now();
        EvalResult train = train_epoch(net, opt, set, split.train, config.batch_size, config.seed, epoch);
        EvalResult val = evaluate(net, set, split.val, config.batch_size);
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = train.loss;
        m.train_acc = train.accuracy;
        m.val_loss = val.loss;
        m.val_acc = val.accuracy;
        m.wall_seconds = config.log_wall_time ? wall : 0.0;
        log_metrics(m, metrics_path);
        result.history.push_back(m);

        if (val.loss < best_val) {
            best_val = val.loss;
            save_checkpoint(net, opt, result.checkpoint_path);
        }
    }
    result.best_val_loss = best_val;
    return result;
}

}  // namespace vcnn
