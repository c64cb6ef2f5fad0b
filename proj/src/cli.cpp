#include "qcnn/cli.hpp"

#include "qcnn/baseline.hpp"
#include "qcnn/dataio.hpp"
#include "qcnn/entropy.hpp"
#include "qcnn/qtrain.hpp"
#include "qcnn/util.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>

namespace qcnn::cli {

namespace {

using json = nlohmann::ordered_json;

/// Invalid combination of otherwise well-formed arguments.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

const char *const kDefaultData = "synth:dim=256,n=200,sep=8,seed=0";

struct CommonOptions {
    std::string data = kDefaultData;
    double train_fraction = 0.8;
    double learning_rate = 0.05;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

struct QuantumOptions {
    std::string encoding = "amplitude";
    std::size_t qubits = 8;
    std::string noise = "none";
    double p = 0.0;
    std::string gradient = "parameter-shift";
    bool two_term_shift = false;
};

const CLI::Validator kAnsatzName(
    [](std::string &s) -> std::string {
        if (s == "all") {
            return {};
        }
        try {
            (void)parse_ansatz(s, 8);
        } catch (const std::invalid_argument &e) {
            return e.what();
        }
        return {};
    },
    "ANSATZ", "ansatz name");

const std::vector<std::string> kNoiseNames = {"none", "bitflip", "phaseflip", "ampdamp", "depol"};
const std::vector<std::string> kEncodingNames = {"amplitude", "angle", "dense-angle"};

void add_common(CLI::App *cmd, CommonOptions &o) {
    cmd->add_option("--data", o.data, "Feature CSV path or synth:dim=..,n=..,sep=..,seed=..");
    cmd->add_option("--train-fraction", o.train_fraction, "Fraction of each class used for training")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--lr", o.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
    cmd->add_option("--epochs", o.epochs, "Training epochs");
    cmd->add_option("--batch-size", o.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Root seed for all randomness");
    cmd->add_option("--workers", o.workers, "Worker threads (results do not depend on this)")
        ->check(CLI::PositiveNumber);
}

void add_quantum(CLI::App *cmd, QuantumOptions &o, bool with_noise) {
    cmd->add_option("--encoding", o.encoding, "amplitude | angle | dense-angle")
        ->check(CLI::IsMember(kEncodingNames));
    cmd->add_option("--qubits", o.qubits, "Register size")->check(CLI::IsMember({8, 10, 12}));
    if (with_noise) {
        cmd->add_option("--noise", o.noise, "none | bitflip | phaseflip | ampdamp | depol")
            ->check(CLI::IsMember(kNoiseNames));
        cmd->add_option("--p", o.p, "Noise intensity")->check(CLI::Range(0.0, 1.0));
    }
    cmd->add_option("--gradient", o.gradient, "parameter-shift | finite-difference")
        ->check(CLI::IsMember({"parameter-shift", "finite-difference"}));
    cmd->add_flag("--two-term-shift", o.two_term_shift,
                  "Apply the two-term shift rule to controlled rotations too (inexact)");
}

json common_json(const CommonOptions &o, const DatasetManifest &manifest) {
    json j;
    j["data"] = o.data;
    j["data_checksum"] = manifest.checksum;
    j["train_fraction"] = o.train_fraction;
    j["learning_rate"] = o.learning_rate;
    j["epochs"] = o.epochs;
    j["batch_size"] = o.batch_size;
    j["seed"] = o.seed;
    return j;
}

json noise_json(const std::optional<NoiseSpec> &noise) {
    if (!noise) {
        return nullptr;
    }
    return json{{"kind", std::string(to_string(noise->kind))}, {"p", noise->p}};
}

json report_json(json config, json model, const TrainReport &r) {
    json j;
    j["config"] = std::move(config);
    j["model"] = std::move(model);
    j["losses"] = r.losses;
    j["final_params"] = r.final_params;
    j["train_acc"] = r.train_acc;
    j["test_acc"] = r.test_acc;
    j["wall_time_s"] = r.wall_time_s;
    return j;
}

struct PreparedData {
    Dataset dataset;
    std::vector<FeatureRecord> train;
    std::vector<FeatureRecord> test;
};

PreparedData prepare_data(const CommonOptions &o, const EncodingSpec &encoding,
                          std::ostream &err) {
    PreparedData d;
    d.dataset = load_or_synthesize(o.data);
    if (d.dataset.records.empty()) {
        throw std::runtime_error("dataset '" + o.data + "' has no records");
    }
    auto parts = split(d.dataset.records, o.train_fraction, o.seed);
    Preprocessor pre(encoding);
    pre.fit(parts.train);
    auto train = pre.apply(parts.train);
    auto test = pre.apply(parts.test);
    if (!train.rejected.empty() || !test.rejected.empty()) {
        err << "warning: dropped " << train.rejected.size() << " training and "
            << test.rejected.size() << " test records with zero norm\n";
    }
    d.train = std::move(train.records);
    d.test = std::move(test.records);
    if (d.train.empty() || d.test.empty()) {
        throw std::runtime_error("no usable records left after preprocessing");
    }
    return d;
}

TrainConfig make_train_config(const CommonOptions &c, const QuantumOptions &q,
                              const AnsatzSpec &ansatz) {
    TrainConfig t;
    t.encoding = {parse_encoding_kind(q.encoding), q.qubits};
    t.ansatz = ansatz;
    if (q.noise != "none") {
        t.noise = NoiseSpec(parse_noise_kind(q.noise), q.p);
    }
    t.learning_rate = c.learning_rate;
    t.epochs = c.epochs;
    t.batch_size = c.batch_size;
    t.seed = c.seed;
    t.gradient_mode = parse_gradient_mode(q.gradient);
    t.two_term_shift_only = q.two_term_shift;
    t.workers = c.workers;
    return t;
}

json quantum_model_json(const TrainConfig &t) {
    json m;
    m["kind"] = "qcnn";
    m["ansatz"] = t.ansatz.name();
    m["n_qubits"] = t.ansatz.n_qubits;
    m["encoding"] = std::string(to_string(t.encoding.kind));
    m["noise"] = noise_json(t.noise);
    m["gradient_mode"] = std::string(to_string(t.gradient_mode));
    m["two_term_shift"] = t.two_term_shift_only;
    m["param_count"] = param_count(t.ansatz);
    return m;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_json(const std::filesystem::path &path, const json &j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

/// Writes the subcommand's effective options as an INI section.
void save_config(const CLI::App *cmd, const std::string &path) {
    std::istringstream lines(cmd->config_to_str(true, false));
    std::string text = "[" + cmd->get_name() + "]\n";
    for (std::string line; std::getline(lines, line);) {
        if (line.rfind("save-config", 0) == 0 || line.rfind("help", 0) == 0) {
            continue;
        }
        text += line + "\n";
    }
    write_file_atomic(path, text);
}

// ---------------------------------------------------------------- train

struct TrainCommand {
    CommonOptions common;
    QuantumOptions quantum;
    std::string ansatz;
    std::string out = "report.json";
    std::size_t export_layer = 0;
    std::string export_path;
    bool verbose = false;

    void add(CLI::App *cmd) {
        add_common(cmd, common);
        add_quantum(cmd, quantum, true);
        cmd->add_option("--ansatz", ansatz, "a1-pool .. a9-pool, a1-nopool .. a9-nopool")
            ->required()
            ->check(kAnsatzName);
        cmd->add_option("--out", out, "Report JSON path");
        cmd->add_option("--export-layer", export_layer,
                        "Also export test-set qubit marginals after this layer");
        cmd->add_option("--export-states", export_path, "CSV path for --export-layer");
        cmd->add_flag("--verbose", verbose, "Print the loss after every epoch");
    }

    int run(std::ostream &out_stream, std::ostream &err) const {
        if (ansatz == "all") {
            throw UsageError("train takes a single ansatz");
        }
        if ((export_layer == 0) != export_path.empty()) {
            throw UsageError("--export-layer and --export-states must be given together");
        }
        const auto spec = parse_ansatz(ansatz, quantum.qubits);
        const TrainConfig config = make_train_config(common, quantum, spec);
        const auto data = prepare_data(common, config.encoding, err);
        EpochCallback progress;
        if (verbose) {
            progress = [&err](std::size_t epoch, double loss) {
                err << "epoch " << epoch << " loss " << fixed(loss, 6) << "\n";
            };
        }
        const TrainReport report = train(config, data.train, data.test, progress);
        json cfg = common_json(common, data.dataset.manifest);
        cfg["n_train"] = data.train.size();
        cfg["n_test"] = data.test.size();
        write_json(out, report_json(std::move(cfg), quantum_model_json(config), report));
        if (export_layer > 0) {
            export_intermediate_states(config, report.final_params, data.test, export_layer,
                                       export_path);
        }
        out_stream << spec.name() << " " << quantum.encoding << " noise=" << quantum.noise;
        if (config.noise) {
            out_stream << "(" << quantum.p << ")";
        }
        out_stream << ": train_acc=" << fixed(report.train_acc, 4)
                   << " test_acc=" << fixed(report.test_acc, 4) << " loss "
                   << fixed(report.losses.front(), 4) << "->" << fixed(report.losses.back(), 4)
                   << " (" << fixed(report.wall_time_s, 1) << " s) -> " << out << "\n";
        return kExitOk;
    }
};

// ---------------------------------------------------------------- baseline

struct BaselineCommand {
    CommonOptions common;
    std::string variant;
    std::size_t qubits = 8;
    std::string out = "baseline.json";

    void add(CLI::App *cmd) {
        add_common(cmd, common);
        cmd->add_option("--variant", variant, "cnn1 .. cnn6")
            ->required()
            ->check(CLI::IsMember(TinyCnn::variants()));
        cmd->add_option("--qubits", qubits, "Inputs are normalized and padded to 2^qubits")
            ->check(CLI::IsMember({8, 10, 12}));
        cmd->add_option("--out", out, "Report JSON path");
    }

    int run(std::ostream &out_stream, std::ostream &err) const {
        const EncodingSpec encoding{EncodingKind::Amplitude, qubits};
        const auto data = prepare_data(common, encoding, err);
        TinyCnn model = TinyCnn::build(variant, encoding.feature_width());
        BaselineConfig config;
        config.learning_rate = common.learning_rate;
        config.epochs = common.epochs;
        config.batch_size = common.batch_size;
        config.seed = common.seed;
        const TrainReport report = train_baseline(model, config, data.train, data.test);

        json cfg = common_json(common, data.dataset.manifest);
        cfg["n_train"] = data.train.size();
        cfg["n_test"] = data.test.size();
        json m;
        m["kind"] = "cnn";
        m["variant"] = variant;
        m["architecture"] = model.describe();
        m["input_dim"] = model.input_dim();
        m["param_count"] = model.param_count();
        write_json(out, report_json(std::move(cfg), std::move(m), report));
        out_stream << variant << " (" << model.param_count()
                   << " params): train_acc=" << fixed(report.train_acc, 4)
                   << " test_acc=" << fixed(report.test_acc, 4) << " -> " << out << "\n";
        return kExitOk;
    }
};

// ---------------------------------------------------------------- sweep

struct SweepCell {
    AnsatzSpec ansatz;
    std::string noise;
    double p = 0.0;
    std::uint64_t seed = 0;
    json config;
    std::string hash;
};

double sample_std(const std::vector<double> &v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double mean = pairwise_sum(v) / static_cast<double>(v.size());
    std::vector<double> sq(v.size());
    std::transform(v.begin(), v.end(), sq.begin(),
                   [mean](double x) { return (x - mean) * (x - mean); });
    return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

struct SweepCommand {
    CommonOptions common;
    QuantumOptions quantum;
    std::vector<std::string> ansatzes = {"all"};
    std::vector<std::string> noises = {"none"};
    std::vector<double> intensities = {0.01, 0.05};
    std::size_t seeds = 1;
    std::string out = "sweep";
    std::size_t max_cells = 0;

    void add(CLI::App *cmd) {
        add_common(cmd, common);
        add_quantum(cmd, quantum, false);
        cmd->add_option("--ansatz", ansatzes, "Ansatz names, or 'all' for the 18 configurations")
            ->delimiter(',')
            ->check(kAnsatzName);
        cmd->add_option("--noise", noises, "Noise kinds (none, bitflip, phaseflip, ampdamp, depol)")
            ->delimiter(',')
            ->check(CLI::IsMember(kNoiseNames));
        cmd->add_option("--p", intensities, "Noise intensities")
            ->delimiter(',')
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--seeds", seeds, "Repeat seeds per cell (seed, seed+1, ...)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "Output directory");
        cmd->add_option("--max-cells", max_cells,
                        "Stop after running this many new cells (0 = no limit)");
    }

    [[nodiscard]] std::vector<AnsatzSpec> expand_ansatzes() const {
        std::vector<AnsatzSpec> specs;
        for (const auto &name : ansatzes) {
            if (name == "all") {
                for (const auto &s : all_ansatzes(quantum.qubits)) {
                    specs.push_back(s);
                }
            } else {
                specs.push_back(parse_ansatz(name, quantum.qubits));
            }
        }
        return specs;
    }

    int run(std::ostream &out_stream, std::ostream &err) const {
        const EncodingSpec encoding{parse_encoding_kind(quantum.encoding), quantum.qubits};
        const auto data = prepare_data(common, encoding, err);
        const std::filesystem::path dir(out);
        const json base = common_json(common, data.dataset.manifest);

        std::vector<SweepCell> cells;
        for (const auto &spec : expand_ansatzes()) {
            for (const auto &noise : noises) {
                const std::vector<double> ps =
                    noise == "none" ? std::vector<double>{0.0} : intensities;
                for (const double p : ps) {
                    for (std::size_t s = 0; s < seeds; ++s) {
                        SweepCell cell{spec, noise, p, common.seed + s, {}, {}};
                        QuantumOptions q = quantum;
                        q.noise = noise;
                        q.p = p;
                        CommonOptions c = common;
                        c.seed = cell.seed;
                        const TrainConfig tc = make_train_config(c, q, spec);
                        cell.config = base;
                        cell.config["seed"] = cell.seed;
                        cell.config["split_seed"] = common.seed;
                        cell.config["model"] = quantum_model_json(tc);
                        cell.hash = fnv1a_hex(cell.config.dump());
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }

        auto cell_path = [&](const SweepCell &c) { return dir / "cells" / (c.hash + ".json"); };
        auto load_done = [&](const SweepCell &c) -> std::optional<json> {
            const auto path = cell_path(c);
            if (!std::filesystem::exists(path)) {
                return std::nullopt;
            }
            try {
                auto j = json::parse(read_file(path));
                if (j.value("status", "") == "ok" && j.contains("test_acc")) {
                    return j;
                }
            } catch (const std::exception &) {
                // Unreadable cell files are recomputed.
            }
            return std::nullopt;
        };

        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!load_done(cells[i])) {
                pending.push_back(i);
            }
        }
        const std::size_t skipped = cells.size() - pending.size();
        if (max_cells > 0 && pending.size() > max_cells) {
            pending.resize(max_cells);
        }

        std::mutex log_mutex;
        parallel_for(pending.size(), common.workers, [&](std::size_t k) {
            const SweepCell &cell = cells[pending[k]];
            json result;
            result["cell"] = cell.config;
            try {
                QuantumOptions q = quantum;
                q.noise = cell.noise;
                q.p = cell.p;
                CommonOptions c = common;
                c.seed = cell.seed;
                TrainConfig tc = make_train_config(c, q, cell.ansatz);
                tc.workers = 1;
                const TrainReport r = train(tc, data.train, data.test);
                result["status"] = "ok";
                result["train_acc"] = r.train_acc;
                result["test_acc"] = r.test_acc;
                result["final_loss"] = r.losses.back();
            } catch (const std::exception &e) {
                result["status"] = "failed";
                result["error"] = e.what();
            }
            write_json(cell_path(cell), result);
            std::lock_guard lock(log_mutex);
            err << "cell " << cell.ansatz.name() << " " << cell.noise << " p=" << cell.p
                << " seed=" << cell.seed << ": " << result["status"].get<std::string>() << "\n";
        });

        std::size_t remaining = 0;
        struct Row {
            std::vector<double> accs;
            std::size_t failed = 0;
        };
        std::vector<std::tuple<std::string, std::string, double>> order;
        std::map<std::tuple<std::string, std::string, double>, Row> rows;
        for (const auto &cell : cells) {
            const auto key = std::make_tuple(cell.ansatz.name(), cell.noise, cell.p);
            if (!rows.contains(key)) {
                order.push_back(key);
            }
            Row &row = rows[key];
            if (auto done = load_done(cell)) {
                row.accs.push_back((*done)["test_acc"].get<double>());
            } else if (std::filesystem::exists(cell_path(cell))) {
                row.failed += 1;
            } else {
                remaining += 1;
            }
        }
        const std::size_t ran = pending.size();
        if (remaining > 0) {
            out_stream << "sweep incomplete: ran " << ran << " cells, skipped " << skipped
                       << " finished cells, " << remaining << " of " << cells.size()
                       << " cells remain; rerun to resume\n";
            return kExitOk;
        }

        std::string csv = "ansatz,noise,p,n_seeds,mean_acc,std_acc,n_failed\n";
        for (const auto &key : order) {
            const Row &row = rows[key];
            const double mean = row.accs.empty() ? std::nan("")
                                                 : pairwise_sum(row.accs) /
                                                       static_cast<double>(row.accs.size());
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%zu,%.17g,%.17g,%zu\n",
                          std::get<0>(key).c_str(), std::get<1>(key).c_str(), std::get<2>(key),
                          row.accs.size(), mean, sample_std(row.accs), row.failed);
            csv += buf;
        }
        write_file_atomic(dir / "sweep.csv", csv);
        json cfg = base;
        cfg["ansatzes"] = ansatzes;
        cfg["noises"] = noises;
        cfg["intensities"] = intensities;
        cfg["seeds"] = seeds;
        cfg["encoding"] = quantum.encoding;
        cfg["qubits"] = quantum.qubits;
        cfg["gradient_mode"] = quantum.gradient;
        cfg["two_term_shift"] = quantum.two_term_shift;
        write_json(dir / "sweep.config.json", cfg);
        out_stream << "sweep: " << rows.size() << " rows from " << cells.size() << " cells (ran "
                   << ran << ", skipped " << skipped << ") -> " << (dir / "sweep.csv").string()
                   << "\n";
        return kExitOk;
    }
};

// ---------------------------------------------------------------- entropy

struct EntropyCommand {
    int conv = 0;
    std::string ansatz;
    bool layerwise = false;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    std::size_t bins = 50;
    std::size_t qubits = 8;
    std::size_t workers = 1;
    std::string out = "entropy";

    void add(CLI::App *cmd) {
        auto *conv_opt =
            cmd->add_option("--conv", conv, "Convolution unit id (1..9)")->check(CLI::Range(1, 9));
        auto *ansatz_opt =
            cmd->add_option("--ansatz", ansatz, "QCNN ansatz for layer-wise sampling")
                ->check(kAnsatzName);
        conv_opt->excludes(ansatz_opt);
        auto *layer_opt =
            cmd->add_flag("--layerwise", layerwise, "Per-layer classification-qubit entropy");
        layer_opt->needs(ansatz_opt);
        ansatz_opt->needs(layer_opt);
        cmd->add_option("-n,--samples", samples, "Random parameter draws")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "Root seed");
        cmd->add_option("--bins", bins, "Histogram bins")->check(CLI::Range(2, 100000));
        cmd->add_option("--qubits", qubits, "Register size for --ansatz")
            ->check(CLI::IsMember({8, 10, 12}));
        cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "Output directory");
    }

    void write_sample(const EntropySample &s, const std::string &stem, json config,
                      std::ostream &out_stream) const {
        const std::filesystem::path dir(out);
        export_histogram(s, bins, dir / (stem + ".csv"));
        json j;
        j["id"] = s.id;
        j["n"] = s.values.size();
        j["mean"] = s.mean;
        j["std"] = s.std;
        j["config"] = std::move(config);
        write_json(dir / (stem + ".json"), j);
        out_stream << s.id << ": n=" << s.values.size() << " mean=" << fixed(s.mean, 6)
                   << " std=" << fixed(s.std, 6) << "\n";
    }

    int run(std::ostream &out_stream, std::ostream &) const {
        if (conv == 0 && ansatz.empty()) {
            throw UsageError("entropy needs --conv or --ansatz --layerwise");
        }
        if (ansatz == "all") {
            throw UsageError("entropy takes a single ansatz");
        }
        json config;
        config["samples"] = samples;
        config["seed"] = seed;
        config["bins"] = bins;
        if (conv > 0) {
            config["conv"] = conv;
            const auto s = conv_unit_entropy_sample(conv, samples, seed, workers);
            write_sample(s, "conv" + std::to_string(conv), config, out_stream);
            return kExitOk;
        }
        const auto spec = parse_ansatz(ansatz, qubits);
        config["ansatz"] = spec.name();
        config["qubits"] = qubits;
        const auto layers = qcnn_layerwise_entropy_sample(spec, samples, seed, workers);
        for (std::size_t l = 0; l < layers.size(); ++l) {
            write_sample(layers[l], spec.name() + "-layer" + std::to_string(l + 1), config,
                         out_stream);
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- synth

struct SynthCommand {
    SyntheticSpec spec;
    std::string out = "synth.csv";

    void add(CLI::App *cmd) {
        cmd->add_option("--dim", spec.dim, "Feature dimension")->check(CLI::Range(2, 1 << 20));
        cmd->add_option("--n", spec.n_per_class, "Records per class")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--sep", spec.separation, "Mean distance in standard deviations")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--seed", spec.seed, "Seed");
        cmd->add_option("--out", out, "CSV path; the manifest goes to <out>.manifest.json");
    }

    int run(std::ostream &out_stream, std::ostream &) const {
        const auto records = spec.generate();
        const auto manifest = write_features(records, out, spec.to_string());
        write_file_atomic(out + ".manifest.json", manifest.to_json() + "\n");
        out_stream << "wrote " << manifest.n_records << " records of dimension "
                   << manifest.feature_dim << " to " << out << " (checksum " << manifest.checksum
                   << ")\n";
        return kExitOk;
    }
};

// ---------------------------------------------------------------- encode-dump

struct EncodeDumpCommand {
    std::string encoding = "amplitude";
    std::size_t qubits = 0;
    std::vector<double> x;
    std::string data;
    std::size_t index = 0;
    std::string out;

    void add(CLI::App *cmd) {
        cmd->add_option("--encoding", encoding, "amplitude | angle | dense-angle")
            ->check(CLI::IsMember(kEncodingNames));
        cmd->add_option("--qubits", qubits, "Register size (default: smallest that fits)");
        auto *x_opt = cmd->add_option("--x", x, "Feature vector, comma separated")->delimiter(',');
        auto *data_opt = cmd->add_option("--data", data, "Dataset to take a record from");
        x_opt->excludes(data_opt);
        cmd->add_option("--index", index, "Record index within --data");
        cmd->add_option("--out", out, "CSV path (default: standard output)");
    }

    int run(std::ostream &out_stream, std::ostream &) const {
        std::vector<double> features = x;
        const auto kind = parse_encoding_kind(encoding);
        if (!data.empty()) {
            const auto ds = load_or_synthesize(data);
            if (index >= ds.records.size()) {
                throw UsageError("--index " + std::to_string(index) + " out of range (" +
                                 std::to_string(ds.records.size()) + " records)");
            }
            features = ds.records[index].features;
            if (kind != EncodingKind::Amplitude) {
                Preprocessor pre({kind, kind == EncodingKind::Angle ? features.size()
                                                                    : features.size() / 2});
                pre.fit(ds.records);
                features = pre.apply({ds.records[index]}).records.front().features;
            }
        }
        if (features.empty()) {
            throw UsageError("encode-dump needs --x or --data");
        }
        std::size_t n = qubits;
        if (n == 0) {
            switch (kind) {
            case EncodingKind::Amplitude:
                n = 1;
                while ((std::size_t{1} << n) < features.size()) {
                    ++n;
                }
                break;
            case EncodingKind::Angle:
                n = features.size();
                break;
            case EncodingKind::DenseAngle:
                n = features.size() / 2;
                break;
            }
        }
        const StateVector state = encode({kind, n}, features);
        std::string csv = "index,re,im\n";
        char buf[96];
        for (std::size_t i = 0; i < state.dim(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, state[i].real(),
                          state[i].imag());
            csv += buf;
        }
        if (out.empty()) {
            out_stream << csv;
        } else {
            write_file_atomic(out, csv);
            out_stream << "wrote " << state.dim() << " amplitudes to " << out << "\n";
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- probe

struct ProbeCommand {
    std::string ansatz;
    std::size_t qubits = 8;
    std::size_t draws = 200;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string out;

    void add(CLI::App *cmd) {
        cmd->add_option("--ansatz", ansatz, "Ansatz name")->required()->check(kAnsatzName);
        cmd->add_option("--qubits", qubits, "Register size")->check(CLI::IsMember({8, 10, 12}));
        cmd->add_option("--draws", draws, "Random parameter draws")->check(CLI::Range(2, 1 << 30));
        cmd->add_option("--seed", seed, "Seed");
        cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "Optional JSON output path");
    }

    int run(std::ostream &out_stream, std::ostream &) const {
        if (ansatz == "all") {
            throw UsageError("probe takes a single ansatz");
        }
        const auto spec = parse_ansatz(ansatz, qubits);
        const auto probe = gradient_variance_probe(spec, draws, seed, workers);
        if (!out.empty()) {
            json j;
            j["ansatz"] = spec.name();
            j["qubits"] = qubits;
            j["draws"] = draws;
            j["seed"] = seed;
            j["variances"] = probe.variances;
            j["min"] = probe.min;
            j["median"] = probe.median;
            write_json(out, j);
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "min=%.6g median=%.6g", probe.min, probe.median);
        out_stream << spec.name() << " gradient variance over " << draws << " draws: " << buf
                   << "\n";
        return kExitOk;
    }
};

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum convolutional neural network workbench", "qcnnwb"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "INI file with one [section] per subcommand");
    app.require_subcommand(1);

    TrainCommand train_cmd;
    SweepCommand sweep_cmd;
    EntropyCommand entropy_cmd;
    BaselineCommand baseline_cmd;
    SynthCommand synth_cmd;
    EncodeDumpCommand encode_cmd;
    ProbeCommand probe_cmd;

    std::string save_path;
    auto add = [&](const char *name, const char *help, auto &command) {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->fallthrough();
        command.add(sub);
        sub->add_option("--save-config", save_path, "Write the effective options as INI and run");
        return sub;
    };
    CLI::App *train_sub = add("train", "Train a QCNN and write a report", train_cmd);
    CLI::App *sweep_sub = add("sweep", "Train over ansatz x noise x intensity x seed cells", sweep_cmd);
    CLI::App *entropy_sub = add("entropy", "Entanglement-entropy sampling", entropy_cmd);
    CLI::App *baseline_sub = add("baseline", "Train a parameter-matched classical CNN", baseline_cmd);
    CLI::App *synth_sub = add("synth", "Write a synthetic two-Gaussian dataset", synth_cmd);
    CLI::App *encode_sub = add("encode-dump", "Print the encoded state of one record", encode_cmd);
    CLI::App *probe_sub = add("probe", "Gradient-variance diagnostic", probe_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        const std::pair<CLI::App *, std::function<int()>> dispatch[] = {
            {train_sub, [&] { return train_cmd.run(out, err); }},
            {sweep_sub, [&] { return sweep_cmd.run(out, err); }},
            {entropy_sub, [&] { return entropy_cmd.run(out, err); }},
            {baseline_sub, [&] { return baseline_cmd.run(out, err); }},
            {synth_sub, [&] { return synth_cmd.run(out, err); }},
            {encode_sub, [&] { return encode_cmd.run(out, err); }},
            {probe_sub, [&] { return probe_cmd.run(out, err); }},
        };
        for (const auto &[sub, fn] : dispatch) {
            if (sub->parsed()) {
                if (!save_path.empty()) {
                    save_config(sub, save_path);
                }
                return fn();
            }
        }
        throw UsageError("no subcommand given");
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace qcnn::cli
