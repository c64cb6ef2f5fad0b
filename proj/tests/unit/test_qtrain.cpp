#include "oracles.hpp"
#include "qcnn/qtrain.hpp"
#include "qcnn/simulate.hpp"
#include "qcnn/util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace qcnn;

namespace {

TrainConfig config_for(const char *ansatz, std::optional<NoiseSpec> noise = std::nullopt) {
    TrainConfig c;
    c.encoding = {EncodingKind::Amplitude, 8};
    c.ansatz = parse_ansatz(ansatz);
    c.noise = noise;
    return c;
}

std::vector<FeatureRecord> random_batch(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<FeatureRecord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].label = static_cast<int>(i % 2);
        out[i].features.resize(256);
        double norm = 0.0;
        for (auto &v : out[i].features) {
            v = g(rng);
            norm += v * v;
        }
        for (auto &v : out[i].features) {
            v /= std::sqrt(norm);
        }
    }
    return out;
}

std::vector<double> random_params(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    std::vector<double> p(n);
    for (auto &v : p) {
        v = u(rng);
    }
    return p;
}

} // namespace

TEST_CASE("binary cross-entropy") {
    const double p1[] = {0.5};
    const int y1[] = {1};
    CHECK(bce_loss(p1, y1) == doctest::Approx(std::log(2.0)));
    const double p2[] = {0.9, 0.2};
    const int y2[] = {1, 0};
    CHECK(bce_loss(p2, y2) == doctest::Approx(0.1643).epsilon(1e-3));
    CHECK(bce_loss(p2, y2) == doctest::Approx(-0.5 * (std::log(0.9) + std::log(0.8))));
    const double sure[] = {1.0 - 1e-12};
    CHECK(bce_loss(sure, y1) < 1e-11);
    const double wrong[] = {0.0};
    CHECK(std::isfinite(bce_loss(wrong, y1)));
    CHECK_THROWS_AS(bce_loss(p2, y1), std::invalid_argument);
}

TEST_CASE("sgd step") {
    const double p[] = {1.0};
    const double g[] = {2.0};
    CHECK(sgd_step(p, g, 0.1)[0] == doctest::Approx(0.8));
    const double zero[] = {0.0};
    CHECK(sgd_step(p, zero, 0.1)[0] == 1.0);
    const double two[] = {1.0, 2.0};
    CHECK_THROWS_AS(sgd_step(p, two, 0.1), std::invalid_argument);
}

TEST_CASE("shift rule on a single Ry") {
    const Circuit c = CircuitBuilder(1, 1).ry(0, ParamSlot{0}).build();
    const double theta = 0.7;
    const std::vector<double> params = {theta};
    Executor base(c, params, StateVector(1));
    base.run_to_end();
    CHECK(base.prob_one(0) == doctest::Approx(std::pow(std::sin(theta / 2), 2)));

    auto p_at = [&](double t) {
        const std::vector<double> q = {t};
        return readout_probability(c, q, StateVector(1));
    };
    const double shift = 0.5 * (p_at(theta + std::numbers::pi / 2) - p_at(theta - std::numbers::pi / 2));
    CHECK(shift == doctest::Approx(std::sin(theta) / 2).epsilon(1e-12));
}

TEST_CASE("prediction of zero rotations on the first basis state") {
    const auto config = config_for("a1-nopool");
    std::vector<double> x(256, 0.0);
    x[0] = 1.0;
    const std::vector<double> zeros(param_count(config.ansatz), 0.0);
    CHECK(predict_prob(config, zeros, x) == doctest::Approx(0.0));
    const std::vector<double> short_x(300, 1.0);
    CHECK_THROWS_AS(predict_prob(config, zeros, short_x), std::invalid_argument);
    const std::vector<double> short_params(3, 0.0);
    CHECK_THROWS_AS(predict_prob(config, short_params, x), std::invalid_argument);
}

TEST_CASE("noise at p = 0 matches the noiseless prediction") {
    const auto batch = random_batch(3, 4);
    const auto plain = config_for("a5-pool");
    const auto noisy = config_for("a5-pool", NoiseSpec(NoiseKind::AmplitudeDamping, 0.0));
    const auto params = random_params(param_count(plain.ansatz), 2);
    for (const auto &r : batch) {
        CHECK(std::abs(predict_prob(plain, params, r.features) -
                       predict_prob(noisy, params, r.features)) < 1e-10);
    }
}

TEST_CASE("parameter shift agrees with finite differences on a batch of four") {
    const auto batch = random_batch(4, 17);
    for (const char *name : {"a3-nopool", "a3-pool", "a9-pool"}) {
        auto config = config_for(name);
        const auto params = random_params(param_count(config.ansatz), 3);
        const auto shift = gradient(config, params, batch);
        config.gradient_mode = GradientMode::FiniteDifference;
        const auto fd = gradient(config, params, batch);
        REQUIRE(shift.size() == fd.size());
        for (std::size_t k = 0; k < shift.size(); ++k) {
            CHECK(std::abs(shift[k] - fd[k]) < 1e-5);
        }
    }
}

TEST_CASE("controlled rotations need the four-term rule") {
    // Conv unit 5 holds two CRz gates.
    const auto batch = random_batch(2, 5);
    auto config = config_for("a5-nopool");
    const QcnnModel model(config);
    const auto params = random_params(model.n_params(), 8);
    const auto input = model.encode(batch[0].features);
    const auto exact = model.prob_gradient(params, input);
    std::vector<double> fd(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        fd[k] = oracle::central_difference(
            [&](const std::vector<double> &p) { return model.predict_prob_state(p, input); },
            params, k, 1e-5);
        CHECK(std::abs(exact[k] - fd[k]) < 1e-8);
    }

    config.two_term_shift_only = true;
    const QcnnModel approx(config);
    const auto two_term = approx.prob_gradient(params, input);
    double worst = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        worst = std::max(worst, std::abs(two_term[k] - fd[k]));
    }
    CHECK(worst > 1e-4);
}

TEST_CASE("gradients are independent of the worker count") {
    const auto batch = random_batch(5, 1);
    auto config = config_for("a4-pool", NoiseSpec(NoiseKind::BitFlip, 0.05));
    const auto params = random_params(param_count(config.ansatz), 6);
    const auto one = gradient(config, params, batch);
    config.workers = 3;
    CHECK(gradient(config, params, batch) == one);
    CHECK_THROWS_AS(gradient(config, params, std::span<const FeatureRecord>{}),
                    std::invalid_argument);
}

TEST_CASE("noisy gradients agree with finite differences") {
    const auto batch = random_batch(2, 9);
    auto config = config_for("a2-pool", NoiseSpec(NoiseKind::Depolarizing, 0.05));
    const auto params = random_params(param_count(config.ansatz), 10);
    const auto shift = gradient(config, params, batch);
    config.gradient_mode = GradientMode::FiniteDifference;
    const auto fd = gradient(config, params, batch);
    for (std::size_t k = 0; k < shift.size(); ++k) {
        CHECK(std::abs(shift[k] - fd[k]) < 1e-6);
    }
}

TEST_CASE("training with zero epochs reports the initial parameters") {
    auto config = config_for("a1-nopool");
    config.epochs = 0;
    const auto data = random_batch(6, 3);
    const auto report = train(config, data, data);
    CHECK(report.losses.size() == 1);
    CHECK(report.final_params == initial_params(param_count(config.ansatz), config.seed));
    CHECK(report.train_acc >= 0.0);
    CHECK(report.train_acc <= 1.0);
}

TEST_CASE("training is deterministic and rejects bad labels") {
    auto config = config_for("a2-nopool");
    config.epochs = 2;
    config.batch_size = 4;
    const auto data = random_batch(8, 12);
    const auto a = train(config, data, data);
    config.workers = 2;
    const auto b = train(config, data, data);
    CHECK(a.losses == b.losses);
    CHECK(a.final_params == b.final_params);
    for (const double l : a.losses) {
        CHECK(std::isfinite(l));
    }

    auto bad = data;
    bad[0].label = 2;
    CHECK_THROWS_AS(train(config, bad, data), std::invalid_argument);
}

TEST_CASE("intermediate state export") {
    const auto config = config_for("a2-pool");
    const auto data = random_batch(3, 7);
    const auto params = random_params(param_count(config.ansatz), 1);
    const auto dir = std::filesystem::temp_directory_path() / "qcnn_export_test";
    std::filesystem::create_directories(dir);
    export_intermediate_states(config, params, data, 1, dir / "l1.csv");
    export_intermediate_states(config, params, data, 3, dir / "l3.csv");
    const auto l1 = read_file(dir / "l1.csv");
    const auto l3 = read_file(dir / "l3.csv");
    CHECK(l1.rfind("index,label,q0_z,q0_p1,q2_z,q2_p1,q4_z,q4_p1,q6_z,q6_p1\n", 0) == 0);
    CHECK(l3.rfind("index,label,q4_z,q4_p1\n", 0) == 0);
    CHECK(std::count(l1.begin(), l1.end(), '\n') == 4);
    CHECK_THROWS_AS(export_intermediate_states(config, params, data, 4, dir / "x.csv"),
                    std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config validation") {
    auto config = config_for("a2-nopool");
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = config_for("a2-nopool");
    config.encoding.n_qubits = 10;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    CHECK(parse_gradient_mode("fd") == GradientMode::FiniteDifference);
}

TEST_CASE("ties classify as one") {
    std::vector<FeatureRecord> data(2);
    data[0].label = 1;
    data[1].label = 0;
    const double probs[] = {0.5, 0.5};
    CHECK(accuracy_from_probs(probs, data) == 0.5);
}

TEST_CASE("gradient variance probe") {
    const auto probe = gradient_variance_probe(parse_ansatz("a1-nopool"), 200, 0);
    CHECK(probe.variances.size() == 6);
    CHECK(probe.median > 1e-6);
    for (const double v : probe.variances) {
        CHECK(v >= 0.0);
    }
    const auto again = gradient_variance_probe(parse_ansatz("a1-nopool"), 200, 0, 2);
    CHECK(again.variances == probe.variances);
    CHECK(probe.min <= probe.median);
    CHECK_THROWS_AS(gradient_variance_probe(parse_ansatz("a1-nopool"), 1, 0),
                    std::invalid_argument);
}
