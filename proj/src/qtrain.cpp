#include "qcnn/qtrain.hpp"

#include "qcnn/simulate.hpp"
#include "qcnn/util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace qcnn {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Four-term shift rule for generators with spectrum {0, +-1/2}.
const double kShiftD1 = (std::numbers::sqrt2 + 1.0) / (4.0 * std::numbers::sqrt2);
const double kShiftD2 = (std::numbers::sqrt2 - 1.0) / (4.0 * std::numbers::sqrt2);

double clip(double p) { return std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip); }

/// d(loss)/dp for one sample, zero where clipping is active.
double loss_slope(double p, int label) {
    if (p <= kProbabilityClip || p >= 1.0 - kProbabilityClip) {
        return 0.0;
    }
    return label == 1 ? -1.0 / p : 1.0 / (1.0 - p);
}

void check_records(std::span<const FeatureRecord> data, const char *what) {
    for (const auto &r : data) {
        if (r.label != 0 && r.label != 1) {
            throw std::invalid_argument(std::string(what) + ": labels must be 0 or 1");
        }
    }
}

/// Column-wise pairwise mean of per-sample vectors.
std::vector<double> column_mean(const std::vector<std::vector<double>> &rows, std::size_t width) {
    std::vector<double> out(width, 0.0);
    std::vector<double> column(rows.size());
    for (std::size_t j = 0; j < width; ++j) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            column[i] = rows[i][j];
        }
        out[j] = pairwise_sum(column) / static_cast<double>(rows.size());
    }
    return out;
}

std::vector<double> batch_probs(const QcnnModel &model, std::span<const double> params,
                                std::span<const FeatureRecord> data) {
    std::vector<double> probs(data.size());
    parallel_for(data.size(), model.config().workers,
                 [&](std::size_t i) { probs[i] = model.predict_prob(params, data[i].features); });
    return probs;
}

std::vector<int> labels_of(std::span<const FeatureRecord> data) {
    std::vector<int> labels(data.size());
    std::transform(data.begin(), data.end(), labels.begin(),
                   [](const FeatureRecord &r) { return r.label; });
    return labels;
}

} // namespace

std::string_view to_string(GradientMode mode) {
    return mode == GradientMode::ParameterShift ? "parameter-shift" : "finite-difference";
}

GradientMode parse_gradient_mode(std::string_view name) {
    if (name == "parameter-shift" || name == "shift") {
        return GradientMode::ParameterShift;
    }
    if (name == "finite-difference" || name == "fd") {
        return GradientMode::FiniteDifference;
    }
    throw std::invalid_argument("unknown gradient mode '" + std::string(name) +
                                "' (expected parameter-shift or finite-difference)");
}

void TrainConfig::validate() const {
    ansatz.validate();
    if (encoding.n_qubits != ansatz.n_qubits) {
        throw std::invalid_argument("encoding uses " + std::to_string(encoding.n_qubits) +
                                    " qubits but the ansatz has " +
                                    std::to_string(ansatz.n_qubits));
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("batch size must be at least 1");
    }
}

QcnnModel::QcnnModel(const TrainConfig &config)
    : config_(config), circuit_((config.validate(), build_qcnn(config.ansatz))),
      readout_(circuit_.readout_qubit()) {
    if (config_.noise) {
        noise_ = NoiseModel{*config_.noise, noise_points(config_.ansatz)};
    }
}

void QcnnModel::check_params(std::span<const double> params) const {
    if (params.size() != circuit_.n_params()) {
        throw std::invalid_argument("expected " + std::to_string(circuit_.n_params()) +
                                    " parameters, got " + std::to_string(params.size()));
    }
}

StateVector QcnnModel::encode(std::span<const double> x) const {
    return qcnn::encode(config_.encoding, x);
}

double QcnnModel::predict_prob(std::span<const double> params, std::span<const double> x) const {
    return predict_prob_state(params, encode(x));
}

double QcnnModel::predict_prob_state(std::span<const double> params,
                                     const StateVector &input) const {
    check_params(params);
    Executor exec(circuit_, params, input, noise_);
    exec.run_to_end();
    return exec.prob_one(readout_);
}

std::vector<double> QcnnModel::prob_gradient(std::span<const double> params,
                                             const StateVector &input) const {
    check_params(params);
    std::vector<double> grad(circuit_.n_params(), 0.0);
    Executor base(circuit_, params, input, noise_);
    const auto ops = circuit_.instructions();
    for (std::size_t pos = 0; pos < ops.size(); ++pos) {
        if (const auto *g = std::get_if<GateOp>(&ops[pos])) {
            const ResolvedAngles angles = resolve_angles(*g, params);
            for (std::size_t a = 0; a < g->angles.size(); ++a) {
                const auto *slot = std::get_if<ParamSlot>(&g->angles[a]);
                if (slot == nullptr) {
                    continue;
                }
                auto shifted = [&](double shift) {
                    Executor e = base;
                    ResolvedAngles moved = angles;
                    moved.values[a] += shift;
                    e.step_with_angles(moved.view());
                    e.run_to_end();
                    return e.prob_one(readout_);
                };
                double d = 0.0;
                if (is_controlled_rotation(g->kind) && !config_.two_term_shift_only) {
                    d = kShiftD1 * (shifted(kHalfPi) - shifted(-kHalfPi)) -
                        kShiftD2 * (shifted(3.0 * kHalfPi) - shifted(-3.0 * kHalfPi));
                } else {
                    d = 0.5 * (shifted(kHalfPi) - shifted(-kHalfPi));
                }
                grad[slot->index] += d;
            }
        }
        base.step();
    }
    return grad;
}

double predict_prob(const TrainConfig &config, std::span<const double> params,
                    std::span<const double> x) {
    return QcnnModel(config).predict_prob(params, x);
}

double bce_loss(std::span<const double> probs, std::span<const int> labels) {
    if (probs.size() != labels.size()) {
        throw std::invalid_argument("bce_loss: " + std::to_string(probs.size()) +
                                    " probabilities for " + std::to_string(labels.size()) +
                                    " labels");
    }
    if (probs.empty()) {
        throw std::invalid_argument("bce_loss: empty input");
    }
    std::vector<double> terms(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = clip(probs[i]);
        if (labels[i] != 0 && labels[i] != 1) {
            throw std::invalid_argument("bce_loss: labels must be 0 or 1");
        }
        terms[i] = labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return pairwise_sum(terms) / static_cast<double>(terms.size());
}

double dataset_loss(const QcnnModel &model, std::span<const double> params,
                    std::span<const FeatureRecord> data) {
    const auto probs = batch_probs(model, params, data);
    const auto labels = labels_of(data);
    return bce_loss(probs, labels);
}

std::vector<double> gradient(const QcnnModel &model, std::span<const double> params,
                             std::span<const FeatureRecord> batch) {
    if (batch.empty()) {
        throw std::invalid_argument("gradient: empty batch");
    }
    check_records(batch, "gradient");
    const std::size_t n = model.n_params();
    if (model.config().gradient_mode == GradientMode::FiniteDifference) {
        std::vector<double> grad(n);
        std::vector<double> moved(params.begin(), params.end());
        for (std::size_t j = 0; j < n; ++j) {
            moved[j] = params[j] + kFiniteDifferenceStep;
            const double up = dataset_loss(model, moved, batch);
            moved[j] = params[j] - kFiniteDifferenceStep;
            const double down = dataset_loss(model, moved, batch);
            moved[j] = params[j];
            grad[j] = (up - down) / (2.0 * kFiniteDifferenceStep);
        }
        return grad;
    }
    std::vector<std::vector<double>> per_sample(batch.size());
    parallel_for(batch.size(), model.config().workers, [&](std::size_t i) {
        const StateVector input = model.encode(batch[i].features);
        const double p = model.predict_prob_state(params, input);
        const double slope = loss_slope(p, batch[i].label);
        auto g = model.prob_gradient(params, input);
        for (auto &v : g) {
            v *= slope;
        }
        per_sample[i] = std::move(g);
    });
    return column_mean(per_sample, n);
}

std::vector<double> gradient(const TrainConfig &config, std::span<const double> params,
                             std::span<const FeatureRecord> batch) {
    return gradient(QcnnModel(config), params, batch);
}

std::vector<double> sgd_step(std::span<const double> params, std::span<const double> grad,
                             double lr) {
    if (params.size() != grad.size()) {
        throw std::invalid_argument("sgd_step: parameter and gradient lengths differ");
    }
    std::vector<double> out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        out[i] = params[i] - lr * grad[i];
    }
    return out;
}

std::vector<double> initial_params(std::size_t n_params, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 40));
    std::vector<double> out(n_params);
    for (auto &v : out) {
        v = kTwoPi * rng.uniform();
    }
    return out;
}

double accuracy_from_probs(std::span<const double> probs, std::span<const FeatureRecord> data) {
    if (probs.size() != data.size() || data.empty()) {
        throw std::invalid_argument("accuracy needs one probability per record");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int predicted = probs[i] >= 0.5 ? 1 : 0;
        correct += predicted == data[i].label ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

Evaluation evaluate(const QcnnModel &model, std::span<const double> params,
                    std::span<const FeatureRecord> data) {
    if (data.empty()) {
        throw std::invalid_argument("evaluate: empty data");
    }
    Evaluation out;
    out.probs = batch_probs(model, params, data);
    out.accuracy = accuracy_from_probs(out.probs, data);
    return out;
}

TrainReport train(const TrainConfig &config, const std::vector<FeatureRecord> &train_set,
                  const std::vector<FeatureRecord> &test_set, const EpochCallback &on_epoch) {
    const auto start = std::chrono::steady_clock::now();
    if (train_set.empty() || test_set.empty()) {
        throw std::invalid_argument("train: training and test sets must be nonempty");
    }
    check_records(train_set, "train");
    check_records(test_set, "train");
    const QcnnModel model(config);

    TrainReport report;
    std::vector<double> params = initial_params(model.n_params(), config.seed);
    report.losses.push_back(dataset_loss(model, params, train_set));
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
            params = sgd_step(params, gradient(model, params, batch), config.learning_rate);
        }
        report.losses.push_back(dataset_loss(model, params, train_set));
        if (!std::isfinite(report.losses.back())) {
            throw std::runtime_error("training loss became non-finite at epoch " +
                                     std::to_string(epoch));
        }
        if (on_epoch) {
            on_epoch(epoch, report.losses.back());
        }
    }
    report.train_acc = evaluate(model, params, train_set).accuracy;
    report.test_acc = evaluate(model, params, test_set).accuracy;
    report.final_params = std::move(params);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void export_intermediate_states(const TrainConfig &config, std::span<const double> params,
                                std::span<const FeatureRecord> data, std::size_t layer,
                                const std::filesystem::path &path) {
    const QcnnModel model(config);
    const Circuit &c = model.circuit();
    if (layer < 1 || layer > c.layer_count()) {
        throw std::invalid_argument("layer must be in 1.." + std::to_string(c.layer_count()));
    }
    if (params.size() != model.n_params()) {
        throw std::invalid_argument("expected " + std::to_string(model.n_params()) +
                                    " parameters");
    }
    const std::size_t stop = c.layer_end_position(layer);
    const auto active = c.active_qubits(stop);

    std::vector<std::string> rows(data.size());
    parallel_for(data.size(), config.workers, [&](std::size_t i) {
        Executor exec(c, params, model.encode(data[i].features), model.noise_model());
        exec.run_to(stop);
        std::string row = std::to_string(i) + "," + std::to_string(data[i].label);
        char buf[64];
        for (const auto q : active) {
            const double p1 = exec.prob_one(q);
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", 1.0 - 2.0 * p1, p1);
            row += buf;
        }
        rows[i] = std::move(row);
    });

    std::string out = "index,label";
    for (const auto q : active) {
        out += ",q" + std::to_string(q) + "_z,q" + std::to_string(q) + "_p1";
    }
    out += '\n';
    for (const auto &r : rows) {
        out += r;
        out += '\n';
    }
    write_file_atomic(path, out);
}

VarianceProbe gradient_variance_probe(const AnsatzSpec &spec, std::size_t n_draws,
                                      std::uint64_t seed, std::size_t workers) {
    if (n_draws < 2) {
        throw std::invalid_argument("gradient_variance_probe needs at least 2 draws");
    }
    TrainConfig config;
    config.ansatz = spec;
    config.encoding = {EncodingKind::Amplitude, spec.n_qubits};
    const QcnnModel model(config);
    const StateVector zero(spec.n_qubits);
    const std::size_t n = model.n_params();

    std::vector<std::vector<double>> grads(n_draws);
    parallel_for(n_draws, workers, [&](std::size_t i) {
        const auto params = initial_params(n, derive_seed(seed, 50, i));
        grads[i] = model.prob_gradient(params, zero);
    });

    VarianceProbe out;
    out.variances.resize(n);
    std::vector<double> column(n_draws);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n_draws; ++i) {
            column[i] = grads[i][j];
        }
        const double mean = pairwise_sum(column) / static_cast<double>(n_draws);
        for (auto &v : column) {
            v = (v - mean) * (v - mean);
        }
        out.variances[j] = pairwise_sum(column) / static_cast<double>(n_draws - 1);
    }
    auto sorted = out.variances;
    std::sort(sorted.begin(), sorted.end());
    out.min = sorted.front();
    const std::size_t mid = sorted.size() / 2;
    out.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return out;
}

} // namespace qcnn
