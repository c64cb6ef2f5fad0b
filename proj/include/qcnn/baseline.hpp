#pragma once

#include "qcnn/dataio.hpp"
#include "qcnn/qtrain.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcnn {

/// Layer of a tiny 1-D network. Convolutions are unpadded.
struct CnnLayer {
    enum class Kind { Conv, Tanh, MeanPool, Dense };
    Kind kind = Kind::Tanh;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    bool bias = true;

    [[nodiscard]] std::size_t param_count() const;
};

/**
 * Parameter-matched classical baseline: a stack of 1-D convolutions with
 * tanh activations, global mean pooling and an affine map to one logit
 * followed by a sigmoid. Variants cnn1 and cnn2 have 12 parameters, cnn3 to
 * cnn6 have 39.
 */
class TinyCnn {
  public:
    static TinyCnn build(std::string_view variant, std::size_t input_dim = 256);
    static std::vector<std::string> variants();

    [[nodiscard]] const std::string &variant() const noexcept { return variant_; }
    [[nodiscard]] std::size_t input_dim() const noexcept { return input_dim_; }
    [[nodiscard]] std::span<const CnnLayer> layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t param_count() const noexcept { return params_.size(); }
    [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
    void set_params(std::span<const double> params);
    /// Glorot-uniform weights, zero biases.
    void initialize(std::uint64_t seed);

    [[nodiscard]] double logit(std::span<const double> x) const;
    [[nodiscard]] double predict_prob(std::span<const double> x) const;
    /// Gradient of the single-sample clipped cross-entropy by backpropagation.
    [[nodiscard]] std::vector<double> loss_gradient(std::span<const double> x, int label) const;
    /// Human-readable layer list.
    [[nodiscard]] std::string describe() const;

  private:
    TinyCnn(std::string variant, std::size_t input_dim, std::vector<CnnLayer> layers);

    std::string variant_;
    std::size_t input_dim_;
    std::vector<CnnLayer> layers_;
    std::vector<double> params_;
};

double dataset_loss(const TinyCnn &model, std::span<const FeatureRecord> data);
std::vector<double> gradient(const TinyCnn &model, std::span<const FeatureRecord> batch);
Evaluation evaluate(const TinyCnn &model, std::span<const FeatureRecord> data);

/// Settings shared with the quantum trainer.
struct BaselineConfig {
    double learning_rate = 0.05;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

/// Same loop, batching and seeds as qcnn::train, with analytic gradients.
TrainReport train_baseline(TinyCnn model, const BaselineConfig &config,
                           const std::vector<FeatureRecord> &train_set,
                           const std::vector<FeatureRecord> &test_set,
                           const EpochCallback &on_epoch = {});

} // namespace qcnn
