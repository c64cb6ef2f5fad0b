// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when a criterion fails that was not listed with --expect-fail.

#include "qcnn/ansatz.hpp"
#include "qcnn/cli.hpp"
#include "qcnn/entropy.hpp"
#include "qcnn/noise.hpp"
#include "qcnn/qtrain.hpp"
#include "qcnn/simulate.hpp"
#include "qcnn/util.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace qcnn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    double budget_s;
    std::function<Outcome()> check;
};

std::string fmt(const char *format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::vector<double> uniform_angles(std::size_t n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    std::vector<double> out(n);
    for (auto &v : out) {
        v = u(rng);
    }
    return out;
}

StateVector random_state(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> amps(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &a : amps) {
        a = Complex(g(rng), g(rng));
        norm += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm);
    }
    return StateVector(n, std::move(amps));
}

Outcome param_table() {
    const std::size_t pooled[] = {12, 12, 18, 24, 24, 24, 36, 36, 51};
    const std::size_t bare[] = {6, 6, 12, 18, 18, 18, 30, 30, 45};
    std::size_t mismatches = 0;
    for (int id = 1; id <= 9; ++id) {
        mismatches += param_count({id, true, 8}) != pooled[id - 1];
        mismatches += param_count({id, false, 8}) != bare[id - 1];
        mismatches += build_qcnn({id, true, 8}).n_params() != pooled[id - 1];
        mismatches += build_qcnn({id, false, 8}).n_params() != bare[id - 1];
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 18 ansatzes"};
}

Outcome pinned_entropy() {
    const auto s = conv_unit_entropy_sample(2, 1000, 0);
    double worst = 0.0;
    for (const double v : s.values) {
        worst = std::max(worst, std::abs(v - 1.0));
    }
    return {worst <= 1e-6, "max |S - 1| = " + fmt("%.3g", worst) + " over 1000 draws"};
}

Outcome entropy_range() {
    double lo = 1.0, hi = 0.0;
    for (int id = 1; id <= 9; ++id) {
        const auto s = conv_unit_entropy_sample(id, 10000, 0);
        for (const double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const bool ok = lo >= -1e-9 && hi <= 1.0 + 1e-9;
    return {ok, "range [" + fmt("%.3g", lo) + ", " + fmt("%.12f", hi) +
                    "] over 10000 draws x 9 conv units"};
}

Outcome layerwise_trend() {
    const auto layers = qcnn_layerwise_entropy_sample(parse_ansatz("a8-nopool"), 10000, 0);
    const double target[] = {0.61, 0.87, 0.91};
    bool monotone = true;
    bool soft = layers.size() == 3;
    std::string means;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        means += (l ? ", " : "") + fmt("%.3f", layers[l].mean);
        if (l > 0 && layers[l].mean < layers[l - 1].mean) {
            monotone = false;
        }
        if (soft && std::abs(layers[l].mean - target[l]) > 0.05) {
            soft = false;
        }
    }
    return {monotone, "means (" + means + ") " + (monotone ? "non-decreasing" : "decreasing") +
                          "; soft target (0.61, 0.87, 0.91) +-0.05 " +
                          (soft ? "met" : "missed (non-blocking)")};
}

Outcome gradient_correctness() {
    std::mt19937_64 rng(derive_seed(0, 90));
    std::normal_distribution<double> g;
    double worst = 0.0;
    const double h = 1e-5;
    for (const auto &spec : all_ansatzes(8)) {
        TrainConfig config;
        config.ansatz = spec;
        config.encoding = {EncodingKind::Amplitude, 8};
        const QcnnModel model(config);
        for (int point = 0; point < 5; ++point) {
            std::vector<FeatureRecord> batch(4);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                batch[i].label = static_cast<int>(i % 2);
                batch[i].features.resize(256);
                for (auto &v : batch[i].features) {
                    v = g(rng);
                }
                double norm = 0.0;
                for (const double v : batch[i].features) {
                    norm += v * v;
                }
                for (auto &v : batch[i].features) {
                    v /= std::sqrt(norm);
                }
            }
            auto params = uniform_angles(model.n_params(), rng);
            const auto shift = gradient(model, params, batch);
            for (std::size_t k = 0; k < params.size(); ++k) {
                const double x0 = params[k];
                params[k] = x0 + h;
                const double up = dataset_loss(model, params, batch);
                params[k] = x0 - h;
                const double down = dataset_loss(model, params, batch);
                params[k] = x0;
                worst = std::max(worst, std::abs(shift[k] - (up - down) / (2 * h)));
            }
        }
    }
    return {worst <= 1e-5,
            "max |shift - FD| = " + fmt("%.3g", worst) + " over 18 ansatzes x 5 points"};
}

Outcome backend_equivalence() {
    std::mt19937_64 rng(derive_seed(0, 91));
    const auto specs = all_ansatzes(8);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto &spec = specs[static_cast<std::size_t>(trial) % specs.size()];
        const Circuit c = build_qcnn(spec);
        const auto params = uniform_angles(c.n_params(), rng);
        const StateVector in = random_state(8, rng);
        const auto pure = run_statevector(c, params, in);
        const auto mixed = run_density(c, params, DensityMatrix(in));
        worst = std::max(worst, trace_distance(mixed.matrix(), pure.projector()));
    }
    return {worst < 1e-10, "max trace distance " + fmt("%.3g", worst) + " over 100 cases"};
}

Outcome noise_algebra() {
    const NoiseKind kinds[] = {NoiseKind::BitFlip, NoiseKind::PhaseFlip,
                               NoiseKind::AmplitudeDamping, NoiseKind::Depolarizing};
    double completeness = 0.0;
    for (const auto kind : kinds) {
        for (const double p : {0.0, 0.01, 0.05, 0.5, 1.0}) {
            ComplexMatrix sum(2, 2);
            for (const auto &k : kraus_ops(NoiseSpec(kind, p))) {
                sum += k.adjoint() * k;
            }
            completeness = std::max(completeness, sum.max_abs_diff(ComplexMatrix::identity(2)));
        }
    }
    std::mt19937_64 rng(derive_seed(0, 92));
    const ComplexMatrix half{{0.5, 0.0}, {0.0, 0.5}};
    double depol = 0.0;
    for (int i = 0; i < 100; ++i) {
        const DensityMatrix rho(random_state(1, rng));
        const auto out = apply_channel(rho, NoiseSpec(NoiseKind::Depolarizing, 0.75), 0);
        depol = std::max(depol, out.matrix().max_abs_diff(half));
    }
    const auto damped = apply_channel(DensityMatrix(StateVector::basis(1, 1)),
                                      NoiseSpec(NoiseKind::AmplitudeDamping, 1.0), 0);
    const ComplexMatrix zero{{1.0, 0.0}, {0.0, 0.0}};
    const double damping = damped.matrix().max_abs_diff(zero);
    const bool ok = completeness <= 1e-12 && depol <= 1e-10 && damping == 0.0;
    return {ok, "completeness " + fmt("%.3g", completeness) + ", depolarizing " +
                    fmt("%.3g", depol) + ", damping " + fmt("%.3g", damping)};
}

/// Reports produced through the command-line driver, shared by the training criteria.
struct Runs {
    fs::path dir;
    std::optional<nlohmann::json> clean;
    double clean_time = 0.0;

    nlohmann::json run_cli(std::vector<std::string> args, const std::string &out) {
        args.insert(args.end(), {"--out", (dir / out).string()});
        std::ostringstream so, se;
        const int code = cli::run(args, so, se);
        if (code != cli::kExitOk) {
            throw std::runtime_error("qcnnwb exited with " + std::to_string(code) + ": " +
                                     se.str());
        }
        return nlohmann::json::parse(read_file(dir / out));
    }

    const nlohmann::json &clean_report() {
        if (!clean) {
            const auto start = std::chrono::steady_clock::now();
            clean = run_cli({"train", "--ansatz", "a3-nopool", "--encoding", "amplitude",
                             "--qubits", "8", "--lr", "0.05", "--epochs", "200"},
                            "a3-nopool.json");
            clean_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        return *clean;
    }
};

Outcome end_to_end(Runs &runs) {
    const auto &r = runs.clean_report();
    const double acc = r["test_acc"];
    const auto &losses = r["losses"];
    const double l0 = losses[0], l10 = losses[10];
    const bool ok = acc >= 0.95 && l10 < l0;
    return {ok, "test accuracy " + fmt("%.4f", acc) + ", loss epoch 0 " + fmt("%.4f", l0) +
                    " -> epoch 10 " + fmt("%.4f", l10)};
}

Outcome noise_robustness(Runs &runs) {
    const double clean = runs.clean_report()["test_acc"];
    const auto noisy = runs.run_cli({"train", "--ansatz", "a3-nopool", "--noise", "depol", "--p",
                                     "0.05", "--lr", "0.05", "--epochs", "200"},
                                    "a3-nopool-depol.json");
    const double acc = noisy["test_acc"];
    const double drop = clean - acc;
    return {drop <= 0.05 + 1e-12, "noiseless " + fmt("%.4f", clean) + ", depolarizing 0.05 " +
                                      fmt("%.4f", acc) + " (drop " + fmt("%.4f", drop) + ")"};
}

std::vector<std::string> keys(const nlohmann::json &j) {
    std::vector<std::string> out;
    for (const auto &[k, v] : j.items()) {
        out.push_back(k);
    }
    return out;
}

Outcome baseline_comparison(Runs &runs) {
    const auto &quantum = runs.clean_report();
    const auto cnn = runs.run_cli({"baseline", "--variant", "cnn1", "--lr", "0.05", "--epochs",
                                   "200"},
                                  "cnn1.json");
    const bool schema = keys(quantum) == keys(cnn) && quantum["config"] == cnn["config"];
    const double q = quantum["test_acc"], c = cnn["test_acc"];
    const std::size_t params = cnn["model"]["param_count"];
    const bool ok = schema && params == 12 && q >= c;
    return {ok, "a3-nopool " + fmt("%.4f", q) + " vs cnn1 " + fmt("%.4f", c) + " (" +
                    std::to_string(params) + " params), schema " +
                    (schema ? "identical" : "differs")};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<std::string> only;
    std::vector<std::string> expect_fail;
    std::string work_dir = (fs::temp_directory_path() / "qcnn_acceptance").string();
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--expect-fail", expect_fail, "Criteria allowed to fail");
    app.add_option("--work-dir", work_dir, "Directory for training reports");
    CLI11_PARSE(app, argc, argv);

    Runs runs;
    runs.dir = work_dir;
    fs::create_directories(runs.dir);

    const std::vector<Criterion> criteria = {
        {"param-count-table", 1.0, param_table},
        {"pinned-entropy", 5.0, pinned_entropy},
        {"entropy-range", 120.0, entropy_range},
        {"layerwise-entanglement-trend", 300.0, layerwise_trend},
        {"gradient-correctness", 600.0, gradient_correctness},
        {"backend-equivalence", 120.0, backend_equivalence},
        {"noise-channel-algebra", 10.0, noise_algebra},
        {"end-to-end-training", 900.0, [&] { return end_to_end(runs); }},
        {"noise-robustness", 1200.0, [&] { return noise_robustness(runs); }},
        {"baseline-comparison", 600.0, [&] { return baseline_comparison(runs); }},
    };

    const std::set<std::string> allowed(expect_fail.begin(), expect_fail.end());
    int unexpected = 0;
    for (const auto &c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.id == "end-to-end-training") {
            elapsed = runs.clean_time;
        }
        const bool in_budget = elapsed < c.budget_s;
        const bool pass = o.pass && in_budget;
        std::cout << (pass ? "PASS " : "FAIL ") << c.id << ": " << o.detail << " ["
                  << fmt("%.1f", elapsed) << " s, budget " << fmt("%.0f", c.budget_s) << " s"
                  << (in_budget ? "" : ", over budget") << "]" << std::endl;
        if (!pass && !allowed.contains(c.id)) {
            ++unexpected;
        }
    }
    return unexpected == 0 ? 0 : 1;
}
