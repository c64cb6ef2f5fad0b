#pragma once

#include "qcnn/ansatz.hpp"
#include "qcnn/dataio.hpp"
#include "qcnn/encodings.hpp"
#include "qcnn/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qcnn {

enum class GradientMode { ParameterShift, FiniteDifference };

std::string_view to_string(GradientMode mode);
GradientMode parse_gradient_mode(std::string_view name);

struct TrainConfig {
    EncodingSpec encoding;
    AnsatzSpec ansatz;
    std::optional<NoiseSpec> noise;
    double learning_rate = 0.05;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    GradientMode gradient_mode = GradientMode::ParameterShift;
    /// Use the two-term +-pi/2 rule for controlled rotations as well (inexact there).
    bool two_term_shift_only = false;
    /// Threads for per-sample work; results do not depend on this.
    std::size_t workers = 1;

    void validate() const;
};

/// Central-difference step used by the finite-difference gradient mode.
inline constexpr double kFiniteDifferenceStep = 1e-4;
/// Probability clipping used by the loss.
inline constexpr double kProbabilityClip = 1e-12;

/**
 * A built QCNN bound to an encoding and optional noise. Inputs to the
 * prediction functions are preprocessed feature vectors (see Preprocessor).
 */
class QcnnModel {
  public:
    explicit QcnnModel(const TrainConfig &config);

    [[nodiscard]] const TrainConfig &config() const noexcept { return config_; }
    [[nodiscard]] const Circuit &circuit() const noexcept { return circuit_; }
    [[nodiscard]] std::size_t n_params() const noexcept { return circuit_.n_params(); }
    [[nodiscard]] std::size_t readout_qubit() const noexcept { return readout_; }
    [[nodiscard]] const std::optional<NoiseModel> &noise_model() const noexcept { return noise_; }

    [[nodiscard]] StateVector encode(std::span<const double> x) const;
    /// Probability of |1> on the readout qubit.
    [[nodiscard]] double predict_prob(std::span<const double> params,
                                      std::span<const double> x) const;
    [[nodiscard]] double predict_prob_state(std::span<const double> params,
                                            const StateVector &input) const;
    /// d p1 / d theta by the shift rules, summed over every gate occurrence of each slot.
    [[nodiscard]] std::vector<double> prob_gradient(std::span<const double> params,
                                                    const StateVector &input) const;

  private:
    void check_params(std::span<const double> params) const;

    TrainConfig config_;
    Circuit circuit_;
    std::size_t readout_;
    std::optional<NoiseModel> noise_;
};

double predict_prob(const TrainConfig &config, std::span<const double> params,
                    std::span<const double> x);

/// Mean binary cross-entropy with probabilities clipped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> probs, std::span<const int> labels);

/// Mean loss over `data` at `params`.
double dataset_loss(const QcnnModel &model, std::span<const double> params,
                    std::span<const FeatureRecord> data);

/// Gradient of the mean batch loss.
std::vector<double> gradient(const QcnnModel &model, std::span<const double> params,
                             std::span<const FeatureRecord> batch);
std::vector<double> gradient(const TrainConfig &config, std::span<const double> params,
                             std::span<const FeatureRecord> batch);

/// params - lr * grad.
std::vector<double> sgd_step(std::span<const double> params, std::span<const double> grad,
                             double lr);

/// Uniform draws on [0, 2pi), one per slot.
std::vector<double> initial_params(std::size_t n_params, std::uint64_t seed);

struct Evaluation {
    double accuracy = 0.0;
    std::vector<double> probs;
};

/// Accuracy under the threshold p >= 0.5 -> class 1.
Evaluation evaluate(const QcnnModel &model, std::span<const double> params,
                    std::span<const FeatureRecord> data);
double accuracy_from_probs(std::span<const double> probs, std::span<const FeatureRecord> data);

struct TrainReport {
    std::vector<double> losses; // losses[0] before training, losses[e] after epoch e
    std::vector<double> final_params;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double wall_time_s = 0.0;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Mini-batch gradient descent; both sets must already be preprocessed.
TrainReport train(const TrainConfig &config, const std::vector<FeatureRecord> &train_set,
                  const std::vector<FeatureRecord> &test_set, const EpochCallback &on_epoch = {});

/**
 * CSV of single-qubit marginals of every active qubit after `layer`:
 * `index,label,q<k>_z,q<k>_p1,...` with one row per record.
 */
void export_intermediate_states(const TrainConfig &config, std::span<const double> params,
                                std::span<const FeatureRecord> data, std::size_t layer,
                                const std::filesystem::path &path);

struct VarianceProbe {
    std::vector<double> variances; // per slot
    double min = 0.0;
    double median = 0.0;
};

/**
 * Sample variance over random parameter draws of d p1 / d theta_k, with the
 * noiseless QCNN acting on |0...0>.
 */
VarianceProbe gradient_variance_probe(const AnsatzSpec &spec, std::size_t n_draws,
                                      std::uint64_t seed, std::size_t workers = 1);

} // namespace qcnn
