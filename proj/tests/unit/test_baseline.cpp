#include "oracles.hpp"
#include "qcnn/baseline.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qcnn;

namespace {

std::vector<FeatureRecord> preprocessed_synth(std::size_t n_per_class, std::uint64_t seed) {
    Preprocessor pre({EncodingKind::Amplitude, 8});
    const auto records = synthesize_gaussians(256, n_per_class, 8.0, seed);
    pre.fit(records);
    return pre.apply(records).records;
}

} // namespace

TEST_CASE("variant parameter budgets") {
    for (const auto &v : TinyCnn::variants()) {
        const auto model = TinyCnn::build(v);
        const std::size_t expected = (v == "cnn1" || v == "cnn2") ? 12 : 39;
        CHECK(model.param_count() == expected);
        std::size_t total = 0;
        for (const auto &layer : model.layers()) {
            total += layer.param_count();
        }
        CHECK(total == expected);
    }
    CHECK(TinyCnn::variants().size() == 6);
    CHECK_THROWS_AS(TinyCnn::build("cnn9"), std::invalid_argument);
}

TEST_CASE("zero weights predict one half") {
    for (const auto &v : TinyCnn::variants()) {
        auto model = TinyCnn::build(v);
        model.set_params(std::vector<double>(model.param_count(), 0.0));
        const std::vector<double> x(256, 0.3);
        CHECK(model.predict_prob(x) == doctest::Approx(0.5));
    }
}

TEST_CASE("backpropagation agrees with finite differences") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> x(256);
    for (auto &v : x) {
        v = g(rng) * 0.2;
    }
    for (const auto &v : TinyCnn::variants()) {
        auto model = TinyCnn::build(v);
        model.initialize(4);
        std::vector<double> params(model.params().begin(), model.params().end());
        for (auto &p : params) {
            p += 0.3 * g(rng);
        }
        model.set_params(params);
        for (const int label : {0, 1}) {
            const auto grad = model.loss_gradient(x, label);
            auto loss = [&](const std::vector<double> &p) {
                auto m = model;
                m.set_params(p);
                const double prob = m.predict_prob(x);
                return label == 1 ? -std::log(prob) : -std::log(1.0 - prob);
            };
            for (std::size_t k = 0; k < params.size(); ++k) {
                CHECK(std::abs(grad[k] - oracle::central_difference(loss, params, k, 1e-5)) <
                      1e-6);
            }
        }
    }
}

TEST_CASE("initialization is seeded") {
    auto a = TinyCnn::build("cnn3");
    auto b = TinyCnn::build("cnn3");
    a.initialize(1);
    b.initialize(1);
    CHECK(std::vector<double>(a.params().begin(), a.params().end()) ==
          std::vector<double>(b.params().begin(), b.params().end()));
}

TEST_CASE("zero epochs reports the initial model") {
    const auto data = preprocessed_synth(5, 0);
    BaselineConfig config;
    config.epochs = 0;
    const auto report = train_baseline(TinyCnn::build("cnn2"), config, data, data);
    CHECK(report.losses.size() == 1);
    CHECK(report.final_params.size() == 12);
}

TEST_CASE("cnn3 learns separable synthetic data") {
    const auto records = preprocessed_synth(200, 0);
    const auto parts = split(records, 0.8, 0);
    BaselineConfig config;
    config.learning_rate = 0.5;
    config.epochs = 100;
    const auto report = train_baseline(TinyCnn::build("cnn3"), config, parts.train, parts.test);
    CHECK(report.test_acc >= 0.8);
}
