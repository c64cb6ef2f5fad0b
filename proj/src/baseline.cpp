#include "qcnn/baseline.hpp"

#include "qcnn/util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcnn {

namespace {

using Kind = CnnLayer::Kind;

CnnLayer conv(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride,
              bool bias = true) {
    return {Kind::Conv, in, out, kernel, stride, bias};
}
CnnLayer dense(std::size_t in, std::size_t out, bool bias = true) {
    return {Kind::Dense, in, out, 1, 1, bias};
}
CnnLayer tanh_layer() { return {Kind::Tanh}; }
CnnLayer mean_pool() { return {Kind::MeanPool}; }

/// Activation tensor: channels x length, row-major.
struct Tensor {
    std::size_t channels = 1;
    std::size_t length = 0;
    std::vector<double> v;

    double &at(std::size_t c, std::size_t t) { return v[c * length + t]; }
    [[nodiscard]] double at(std::size_t c, std::size_t t) const { return v[c * length + t]; }
};

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

std::size_t conv_out_length(std::size_t length, const CnnLayer &l) {
    if (length < l.kernel) {
        throw std::invalid_argument("convolution kernel " + std::to_string(l.kernel) +
                                    " longer than its input (" + std::to_string(length) + ")");
    }
    return (length - l.kernel) / l.stride + 1;
}

/// Forward pass that keeps every intermediate activation.
std::vector<Tensor> forward_all(std::span<const CnnLayer> layers, std::span<const double> params,
                                std::span<const double> x) {
    std::vector<Tensor> acts;
    acts.push_back({1, x.size(), std::vector<double>(x.begin(), x.end())});
    std::size_t offset = 0;
    for (const auto &l : layers) {
        const Tensor &in = acts.back();
        Tensor out;
        switch (l.kind) {
        case Kind::Conv: {
            out.channels = l.out_channels;
            out.length = conv_out_length(in.length, l);
            out.v.assign(out.channels * out.length, 0.0);
            const double *w = params.data() + offset;
            const double *b = w + l.out_channels * l.in_channels * l.kernel;
            for (std::size_t o = 0; o < l.out_channels; ++o) {
                for (std::size_t t = 0; t < out.length; ++t) {
                    double acc = l.bias ? b[o] : 0.0;
                    for (std::size_t i = 0; i < l.in_channels; ++i) {
                        const double *wk = w + (o * l.in_channels + i) * l.kernel;
                        for (std::size_t k = 0; k < l.kernel; ++k) {
                            acc += wk[k] * in.at(i, t * l.stride + k);
                        }
                    }
                    out.at(o, t) = acc;
                }
            }
            break;
        }
        case Kind::Tanh:
            out = in;
            for (auto &v : out.v) {
                v = std::tanh(v);
            }
            break;
        case Kind::MeanPool:
            out.channels = in.channels;
            out.length = 1;
            out.v.assign(in.channels, 0.0);
            for (std::size_t c = 0; c < in.channels; ++c) {
                double acc = 0.0;
                for (std::size_t t = 0; t < in.length; ++t) {
                    acc += in.at(c, t);
                }
                out.v[c] = acc / static_cast<double>(in.length);
            }
            break;
        case Kind::Dense: {
            if (in.v.size() != l.in_channels) {
                throw std::invalid_argument("dense layer expects " +
                                            std::to_string(l.in_channels) + " inputs, got " +
                                            std::to_string(in.v.size()));
            }
            out.channels = l.out_channels;
            out.length = 1;
            out.v.assign(l.out_channels, 0.0);
            const double *w = params.data() + offset;
            const double *b = w + l.out_channels * l.in_channels;
            for (std::size_t o = 0; o < l.out_channels; ++o) {
                double acc = l.bias ? b[o] : 0.0;
                for (std::size_t i = 0; i < l.in_channels; ++i) {
                    acc += w[o * l.in_channels + i] * in.v[i];
                }
                out.v[o] = acc;
            }
            break;
        }
        }
        offset += l.param_count();
        acts.push_back(std::move(out));
    }
    return acts;
}

} // namespace

std::size_t CnnLayer::param_count() const {
    switch (kind) {
    case Kind::Conv:
        return out_channels * in_channels * kernel + (bias ? out_channels : 0);
    case Kind::Dense:
        return out_channels * in_channels + (bias ? out_channels : 0);
    case Kind::Tanh:
    case Kind::MeanPool:
        return 0;
    }
    return 0;
}

TinyCnn::TinyCnn(std::string variant, std::size_t input_dim, std::vector<CnnLayer> layers)
    : variant_(std::move(variant)), input_dim_(input_dim), layers_(std::move(layers)) {
    std::size_t n = 0;
    for (const auto &l : layers_) {
        n += l.param_count();
    }
    params_.assign(n, 0.0);
    // Shape check: a forward pass on zeros must yield exactly one logit.
    const std::vector<double> zeros(input_dim_, 0.0);
    const auto acts = forward_all(layers_, params_, zeros);
    if (acts.back().v.size() != 1) {
        throw std::logic_error(variant_ + " does not end in a single logit");
    }
}

std::vector<std::string> TinyCnn::variants() {
    return {"cnn1", "cnn2", "cnn3", "cnn4", "cnn5", "cnn6"};
}

TinyCnn TinyCnn::build(std::string_view variant, std::size_t input_dim) {
    std::vector<CnnLayer> layers;
    std::size_t budget = 0;
    if (variant == "cnn1") {
        layers = {conv(1, 1, 8, 8), tanh_layer(), conv(1, 1, 1, 1), tanh_layer(), mean_pool(),
                  dense(1, 1, false)};
        budget = 12;
    } else if (variant == "cnn2") {
        layers = {conv(1, 1, 4, 4), tanh_layer(), conv(1, 1, 4, 4), tanh_layer(), mean_pool(),
                  dense(1, 1)};
        budget = 12;
    } else if (variant == "cnn3") {
        layers = {conv(1, 2, 8, 8), tanh_layer(), conv(2, 2, 4, 4), tanh_layer(), mean_pool(),
                  dense(2, 1)};
        budget = 39;
    } else if (variant == "cnn4") {
        layers = {conv(1, 4, 4, 4), tanh_layer(), conv(4, 3, 1, 1), tanh_layer(), mean_pool(),
                  dense(3, 1)};
        budget = 39;
    } else if (variant == "cnn5") {
        layers = {conv(1, 1, 16, 8), tanh_layer(), conv(1, 1, 16, 1), tanh_layer(),
                  conv(1, 1, 2, 2), tanh_layer(), mean_pool(), dense(1, 1)};
        budget = 39;
    } else if (variant == "cnn6") {
        layers = {conv(1, 2, 10, 6), tanh_layer(), conv(2, 2, 3, 1), tanh_layer(), mean_pool(),
                  dense(2, 1)};
        budget = 39;
    } else {
        throw std::invalid_argument("unknown baseline variant '" + std::string(variant) +
                                    "' (expected cnn1..cnn6)");
    }
    TinyCnn model(std::string(variant), input_dim, std::move(layers));
    if (model.param_count() != budget) {
        throw std::logic_error(model.variant_ + " has " + std::to_string(model.param_count()) +
                               " parameters, expected " + std::to_string(budget));
    }
    return model;
}

void TinyCnn::set_params(std::span<const double> params) {
    if (params.size() != params_.size()) {
        throw std::invalid_argument("expected " + std::to_string(params_.size()) +
                                    " parameters, got " + std::to_string(params.size()));
    }
    params_.assign(params.begin(), params.end());
}

void TinyCnn::initialize(std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 60));
    std::size_t offset = 0;
    for (const auto &l : layers_) {
        if (l.kind == Kind::Conv || l.kind == Kind::Dense) {
            const std::size_t fan_in = l.in_channels * l.kernel;
            const std::size_t fan_out = l.out_channels * l.kernel;
            const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            const std::size_t n_weights = l.out_channels * l.in_channels * l.kernel;
            for (std::size_t i = 0; i < n_weights; ++i) {
                params_[offset + i] = limit * (2.0 * rng.uniform() - 1.0);
            }
            for (std::size_t i = n_weights; i < l.param_count(); ++i) {
                params_[offset + i] = 0.0;
            }
        }
        offset += l.param_count();
    }
}

double TinyCnn::logit(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw std::invalid_argument(variant_ + " expects " + std::to_string(input_dim_) +
                                    " features, got " + std::to_string(x.size()));
    }
    return forward_all(layers_, params_, x).back().v[0];
}

double TinyCnn::predict_prob(std::span<const double> x) const { return sigmoid(logit(x)); }

std::vector<double> TinyCnn::loss_gradient(std::span<const double> x, int label) const {
    if (x.size() != input_dim_) {
        throw std::invalid_argument(variant_ + " expects " + std::to_string(input_dim_) +
                                    " features, got " + std::to_string(x.size()));
    }
    const auto acts = forward_all(layers_, params_, x);
    const double p = sigmoid(acts.back().v[0]);
    std::vector<double> grad(params_.size(), 0.0);
    if (p <= kProbabilityClip || p >= 1.0 - kProbabilityClip) {
        return grad;
    }

    std::vector<std::size_t> offsets(layers_.size());
    std::size_t offset = 0;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        offsets[li] = offset;
        offset += layers_[li].param_count();
    }

    Tensor delta{1, 1, {p - static_cast<double>(label)}};
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const auto &l = layers_[li];
        const Tensor &in = acts[li];
        const Tensor &out = acts[li + 1];
        Tensor back{in.channels, in.length, std::vector<double>(in.v.size(), 0.0)};
        switch (l.kind) {
        case Kind::Conv: {
            const double *w = params_.data() + offsets[li];
            double *gw = grad.data() + offsets[li];
            double *gb = gw + l.out_channels * l.in_channels * l.kernel;
            for (std::size_t o = 0; o < l.out_channels; ++o) {
                for (std::size_t t = 0; t < out.length; ++t) {
                    const double d = delta.at(o, t);
                    if (l.bias) {
                        gb[o] += d;
                    }
                    for (std::size_t i = 0; i < l.in_channels; ++i) {
                        const std::size_t wbase = (o * l.in_channels + i) * l.kernel;
                        for (std::size_t k = 0; k < l.kernel; ++k) {
                            gw[wbase + k] += d * in.at(i, t * l.stride + k);
                            back.at(i, t * l.stride + k) += d * w[wbase + k];
                        }
                    }
                }
            }
            break;
        }
        case Kind::Tanh:
            for (std::size_t i = 0; i < back.v.size(); ++i) {
                back.v[i] = delta.v[i] * (1.0 - out.v[i] * out.v[i]);
            }
            break;
        case Kind::MeanPool:
            for (std::size_t c = 0; c < in.channels; ++c) {
                for (std::size_t t = 0; t < in.length; ++t) {
                    back.at(c, t) = delta.v[c] / static_cast<double>(in.length);
                }
            }
            break;
        case Kind::Dense: {
            const double *w = params_.data() + offsets[li];
            double *gw = grad.data() + offsets[li];
            double *gb = gw + l.out_channels * l.in_channels;
            for (std::size_t o = 0; o < l.out_channels; ++o) {
                const double d = delta.v[o];
                if (l.bias) {
                    gb[o] += d;
                }
                for (std::size_t i = 0; i < l.in_channels; ++i) {
                    gw[o * l.in_channels + i] += d * in.v[i];
                    back.v[i] += d * w[o * l.in_channels + i];
                }
            }
            break;
        }
        }
        delta = std::move(back);
    }
    return grad;
}

std::string TinyCnn::describe() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto &l = layers_[i];
        if (i > 0) {
            out << " -> ";
        }
        switch (l.kind) {
        case Kind::Conv:
            out << "conv1d(" << l.in_channels << "->" << l.out_channels << ", k=" << l.kernel
                << ", s=" << l.stride << (l.bias ? ", bias" : "") << ")";
            break;
        case Kind::Tanh:
            out << "tanh";
            break;
        case Kind::MeanPool:
            out << "mean";
            break;
        case Kind::Dense:
            out << "dense(" << l.in_channels << "->" << l.out_channels << (l.bias ? ", bias" : "")
                << ")";
            break;
        }
    }
    out << " -> sigmoid";
    return out.str();
}

double dataset_loss(const TinyCnn &model, std::span<const FeatureRecord> data) {
    std::vector<double> probs(data.size());
    std::vector<int> labels(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        probs[i] = model.predict_prob(data[i].features);
        labels[i] = data[i].label;
    }
    return bce_loss(probs, labels);
}

std::vector<double> gradient(const TinyCnn &model, std::span<const FeatureRecord> batch) {
    if (batch.empty()) {
        throw std::invalid_argument("gradient: empty batch");
    }
    const std::size_t n = model.param_count();
    std::vector<std::vector<double>> per_sample(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].label != 0 && batch[i].label != 1) {
            throw std::invalid_argument("gradient: labels must be 0 or 1");
        }
        per_sample[i] = model.loss_gradient(batch[i].features, batch[i].label);
    }
    std::vector<double> out(n);
    std::vector<double> column(batch.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < batch.size(); ++i) {
            column[i] = per_sample[i][j];
        }
        out[j] = pairwise_sum(column) / static_cast<double>(batch.size());
    }
    return out;
}

Evaluation evaluate(const TinyCnn &model, std::span<const FeatureRecord> data) {
    if (data.empty()) {
        throw std::invalid_argument("evaluate: empty data");
    }
    Evaluation out;
    out.probs.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.probs[i] = model.predict_prob(data[i].features);
    }
    out.accuracy = accuracy_from_probs(out.probs, data);
    return out;
}

TrainReport train_baseline(TinyCnn model, const BaselineConfig &config,
                           const std::vector<FeatureRecord> &train_set,
                           const std::vector<FeatureRecord> &test_set,
                           const EpochCallback &on_epoch) {
    const auto start = std::chrono::steady_clock::now();
    if (train_set.empty() || test_set.empty()) {
        throw std::invalid_argument("train_baseline: training and test sets must be nonempty");
    }
    if (!(config.learning_rate > 0.0) || config.batch_size < 1) {
        throw std::invalid_argument("train_baseline: need a positive learning rate and batch size");
    }
    model.initialize(config.seed);

    TrainReport report;
    report.losses.push_back(dataset_loss(model, train_set));
    if (on_epoch) {
        on_epoch(0, report.losses.back());
    }
    std::vector<FeatureRecord> batch;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        SplitMix64 rng(derive_seed(config.seed, 41, epoch));
        const auto order = shuffled_indices(train_set.size(), rng);
        for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
            const std::size_t last = std::min(order.size(), first + config.batch_size);
            batch.clear();
            for (std::size_t k = first; k < last; ++k) {
                batch.push_back(train_set[order[k]]);
            }
            model.set_params(sgd_step(model.params(), gradient(model, batch),
                                      config.learning_rate));
        }
        report.losses.push_back(dataset_loss(model, train_set));
        if (on_epoch) {
            on_epoch(epoch, report.losses.back());
        }
    }
    report.train_acc = evaluate(model, train_set).accuracy;
    report.test_acc = evaluate(model, test_set).accuracy;
    report.final_params.assign(model.params().begin(), model.params().end());
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace qcnn
