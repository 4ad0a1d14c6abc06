#include "core/gradcheck.hpp"

#include <cmath>
#include <functional>

#include "core/layers.hpp"
#include "core/loss.hpp"
#include "core/rng.hpp"

namespace vcnn {

namespace {

using nn::TensorT;

constexpr double kEps = 1e-3;

TensorD random_tensor(const std::vector<int64_t>& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    TensorD t(shape);
    for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

double probe(const TensorD& upstream, const TensorD& out) {
    if (!upstream.same_shape(out)) raise(ErrorCode::Internal, "gradcheck probe shape mismatch");
    double sum = 0.0;
    for (int64_t i = 0; i < out.size(); ++i) sum += upstream[i] * out[i];
    return sum;
}

// Central differences of `loss()` against the analytic gradient, worst entry.
double fd_compare(TensorD& theta, const TensorD& analytic, const std::function<double()>& loss) {
    double worst = 0.0;
    for (int64_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + kEps;
        double up = loss();
        theta[i] = saved - kEps;
        double down = loss();
        theta[i] = saved;
        double fd = (up - down) / (2.0 * kEps);
        double denom = std::max({1.0, std::abs(fd), std::abs(analytic[i])});
        worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
    }
    return worst;
}

GradCheckEntry check_conv(uint64_t seed, bool corrupt) {
    Rng rng = substream(seed, "gradcheck-conv");
    TensorD x = random_tensor({1, 5, 5, 5, 2}, rng);
    nn::ConvParams<double> p;
    p.weights = random_tensor({3, 3, 3, 2, 3}, rng);
    p.bias = random_tensor({3}, rng);
    TensorD upstream = random_tensor({1, 3, 3, 3, 3}, rng);

    auto grads = nn::conv3d_backward(x, p, upstream);
    if (corrupt)
        for (int64_t i = 0; i < grads.weights.size(); ++i) grads.weights[i] *= 1.001;

    auto loss = [&] { return probe(upstream, nn::conv3d_forward(x, p)); };
    double worst = fd_compare(x, grads.x, loss);
    worst = std::max(worst, fd_compare(p.weights, grads.weights, loss));
    worst = std::max(worst, fd_compare(p.bias, grads.bias, loss));
    return {"conv3d", worst, 1e-5, worst < 1e-5};
}

GradCheckEntry check_maxpool(uint64_t seed) {
    Rng rng = substream(seed, "gradcheck-maxpool");
    // Distinct values with gaps far above 2*eps keep the argmax stable.
    TensorD x({1, 4, 4, 4, 3});
    std::vector<int64_t> order(static_cast<size_t>(x.size()));
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
    rng.shuffle(order);
    for (int64_t i = 0; i < x.size(); ++i) x[i] = 0.1 * static_cast<double>(order[static_cast<size_t>(i)]);

    TensorD upstream = random_tensor({1, 2, 2, 2, 3}, rng);
    TensorD analytic = nn::maxpool3d_backward(x, upstream, 2);
    auto loss = [&] { return probe(upstream, nn::maxpool3d_forward(x, 2)); };
    double worst = fd_compare(x, analytic, loss);
    return {"maxpool3d", worst, 1e-5, worst < 1e-5};
}

GradCheckEntry check_relu(uint64_t seed) {
    Rng rng = substream(seed, "gradcheck-relu");
    TensorD x({64});
    for (int64_t i = 0; i < x.size(); ++i) {
        double magnitude = rng.uniform(0.02, 1.0);  // keep |x| > 1e-2, away from the kink
        x[i] = rng.uniform() < 0.5 ? -magnitude : magnitude;
    }
    TensorD upstream = random_tensor({64}, rng);
    TensorD analytic = nn::relu_backward(x, upstream);
    auto loss = [&] { return probe(upstream, nn::relu_forward(x)); };
    double worst = fd_compare(x, analytic, loss);
    return {"relu", worst, 1e-5, worst < 1e-5};
}

GradCheckEntry check_dense(uint64_t seed) {
    Rng rng = substream(seed, "gradcheck-dense");
    TensorD x = random_tensor({2, 7}, rng);
    nn::DenseParams<double> p;
    p.weights = random_tensor({7, 4}, rng);
    p.bias = random_tensor({4}, rng);
    TensorD upstream = random_tensor({2, 4}, rng);

    auto grads = nn::dense_backward(x, p, upstream);
    auto loss = [&] { return probe(upstream, nn::dense_forward(x, p)); };
    double worst = fd_compare(x, grads.x, loss);
    worst = std::max(worst, fd_compare(p.weights, grads.weights, loss));
    worst = std::max(worst, fd_compare(p.bias, grads.bias, loss));
    return {"dense", worst, 1e-5, worst < 1e-5};
}

GradCheckEntry check_flatten(uint64_t seed) {
    Rng rng = substream(seed, "gradcheck-flatten");
    TensorD x = random_tensor({2, 3, 2, 2, 2}, rng);
    TensorD upstream = random_tensor({2, 24}, rng);
    TensorD analytic = nn::flatten_backward(upstream, x.shape());
    auto loss = [&] { return probe(upstream, nn::flatten_forward(x)); };
    double worst = fd_compare(x, analytic, loss);
    return {"flatten", worst, 1e-5, worst < 1e-5};
}

GradCheckEntry check_sigmoid_bce(uint64_t seed) {
    Rng rng = substream(seed, "gradcheck-bce");
    TensorD logits = random_tensor({4, 1}, rng, -3.0, 3.0);
    std::vector<int> targets;
    for (int i = 0; i < 4; ++i) targets.push_back(rng.uniform() < 0.5 ? 0 : 1);

    auto result = nn::bce_with_logits(logits, targets);
    auto loss = [&] { return nn::bce_with_logits(logits, targets).loss; };
    double worst = fd_compare(logits, result.grad_logits, loss);
    return {"sigmoid_bce", worst, 1e-5, worst < 1e-5};
}

GradCheckEntry check_batchnorm(uint64_t seed) {
    Rng rng = substream(seed, "gradcheck-batchnorm");
    TensorD x = random_tensor({2, 2, 2, 2, 3}, rng);
    nn::BatchNormParams<double> p;
    p.gamma = random_tensor({3}, rng, 0.5, 1.5);
    p.beta = random_tensor({3}, rng);
    p.running_mean = TensorD({3});
    p.running_var = TensorD({3});
    TensorD upstream = random_tensor({2, 2, 2, 2, 3}, rng);

    nn::BatchNormCache<double> cache;
    auto params = p;
    nn::batchnorm_forward(x, params, true, &cache);
    auto grads = nn::batchnorm_backward(x, params, cache, upstream);

    auto loss = [&] {
        auto fresh = p;  // running-moment updates must not leak between evals
        return probe(upstream, nn::batchnorm_forward<double>(x, fresh, true, nullptr));
    };
    double worst = fd_compare(x, grads.x, loss);
    worst = std::max(worst, fd_compare(p.gamma, grads.gamma, loss));
    worst = std::max(worst, fd_compare(p.beta, grads.beta, loss));
    return {"batchnorm", worst, 1e-4, worst < 1e-4};
}

}  // namespace

std::vector<GradCheckEntry> run_gradcheck(uint64_t seed, bool corrupt_conv) {
    std::vector<GradCheckEntry> entries;
    entries.push_back(check_conv(seed, corrupt_conv));
    entries.push_back(check_maxpool(seed));
    entries.push_back(check_relu(seed));
    entries.push_back(check_dense(seed));
    entries.push_back(check_flatten(seed));
    entries.push_back(check_sigmoid_bce(seed));
    entries.push_back(check_batchnorm(seed));
    return entries;
}

bool gradcheck_passed(const std::vector<GradCheckEntry>& entries) {
    for (const auto& e : entries)
        if (!e.passed) return false;
    return true;
}

}  // namespace vcnn
