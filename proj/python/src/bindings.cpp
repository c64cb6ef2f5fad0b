#include "qcnn/ansatz.hpp"
#include "qcnn/baseline.hpp"
#include "qcnn/cli.hpp"
#include "qcnn/dataio.hpp"
#include "qcnn/entropy.hpp"
#include "qcnn/qtrain.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace qcnn;

namespace {

TrainConfig make_config(const std::string &ansatz, const std::string &encoding,
                        std::size_t qubits, const std::optional<std::string> &noise, double p,
                        double lr, std::size_t epochs, std::size_t batch_size,
                        std::uint64_t seed, const std::string &gradient_mode,
                        std::size_t workers) {
    TrainConfig c;
    c.ansatz = parse_ansatz(ansatz, qubits);
    c.encoding = {parse_encoding_kind(encoding), qubits};
    if (noise && *noise != "none") {
        c.noise = NoiseSpec(parse_noise_kind(*noise), p);
    }
    c.learning_rate = lr;
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.seed = seed;
    c.gradient_mode = parse_gradient_mode(gradient_mode);
    c.workers = workers;
    c.validate();
    return c;
}

py::dict report_dict(const TrainReport &r) {
    py::dict d;
    d["losses"] = r.losses;
    d["final_params"] = r.final_params;
    d["train_acc"] = r.train_acc;
    d["test_acc"] = r.test_acc;
    d["wall_time_s"] = r.wall_time_s;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "QCNN simulation, training and analysis core";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

    py::class_<FeatureRecord>(m, "FeatureRecord")
        .def(py::init<>())
        .def(py::init([](int label, std::vector<double> features) {
                 return FeatureRecord{label, std::move(features)};
             }),
             py::arg("label"), py::arg("features"))
        .def_readwrite("label", &FeatureRecord::label)
        .def_readwrite("features", &FeatureRecord::features)
        .def("__repr__", [](const FeatureRecord &r) {
            return "FeatureRecord(label=" + std::to_string(r.label) +
                   ", dim=" + std::to_string(r.features.size()) + ")";
        });

    py::class_<AnsatzSpec>(m, "AnsatzSpec")
        .def_readonly("conv_id", &AnsatzSpec::conv_id)
        .def_readonly("pooling", &AnsatzSpec::pooling)
        .def_readonly("n_qubits", &AnsatzSpec::n_qubits)
        .def_property_readonly("name", &AnsatzSpec::name)
        .def("__repr__", [](const AnsatzSpec &s) { return "AnsatzSpec('" + s.name() + "')"; });

    m.def("parse_ansatz", &parse_ansatz, py::arg("name"), py::arg("n_qubits") = 8);
    m.def("all_ansatzes", &all_ansatzes, py::arg("n_qubits") = 8);
    m.def(
        "param_count",
        [](const std::string &name, std::size_t n_qubits) {
            return param_count(parse_ansatz(name, n_qubits));
        },
        py::arg("ansatz"), py::arg("n_qubits") = 8);

    m.def(
        "encode",
        [](const std::string &kind, std::size_t n_qubits, std::vector<double> x) {
            const auto s = encode({parse_encoding_kind(kind), n_qubits}, x);
            const auto amps = s.amplitudes();
            return py::array_t<std::complex<double>>(
                {static_cast<py::ssize_t>(amps.size())},
                {static_cast<py::ssize_t>(sizeof(std::complex<double>))}, amps.data());
        },
        py::arg("kind"), py::arg("n_qubits"), py::arg("x"),
        "Encoded state amplitudes of x.");

    m.def(
        "predict_prob",
        [](const std::string &ansatz, const std::vector<double> &params,
           const std::vector<double> &x, const std::string &encoding, std::size_t qubits,
           const std::optional<std::string> &noise, double p) {
            const auto c = make_config(ansatz, encoding, qubits, noise, p, 0.05, 1, 1, 0,
                                       "parameter-shift", 1);
            return predict_prob(c, params, x);
        },
        py::arg("ansatz"), py::arg("params"), py::arg("x"), py::arg("encoding") = "amplitude",
        py::arg("qubits") = 8, py::arg("noise") = py::none(), py::arg("p") = 0.0);

    m.def(
        "bce_loss",
        [](const std::vector<double> &probs, const std::vector<int> &labels) {
            return bce_loss(probs, labels);
        },
        py::arg("probs"), py::arg("labels"));

    m.def(
        "gradient",
        [](const std::string &ansatz, const std::vector<double> &params,
           const std::vector<FeatureRecord> &batch, const std::string &encoding,
           std::size_t qubits, const std::optional<std::string> &noise, double p,
           const std::string &mode) {
            const auto c =
                make_config(ansatz, encoding, qubits, noise, p, 0.05, 1, 1, 0, mode, 1);
            return gradient(c, params, batch);
        },
        py::arg("ansatz"), py::arg("params"), py::arg("batch"),
        py::arg("encoding") = "amplitude", py::arg("qubits") = 8, py::arg("noise") = py::none(),
        py::arg("p") = 0.0, py::arg("mode") = "parameter-shift",
        "Gradient of the mean binary cross-entropy over a preprocessed batch.");

    m.def(
        "train",
        [](const std::string &ansatz, const std::vector<FeatureRecord> &train_set,
           const std::vector<FeatureRecord> &test_set, const std::string &encoding,
           std::size_t qubits, const std::optional<std::string> &noise, double p, double lr,
           std::size_t epochs, std::size_t batch_size, std::uint64_t seed,
           const std::string &mode, std::size_t workers) {
            const auto c = make_config(ansatz, encoding, qubits, noise, p, lr, epochs,
                                       batch_size, seed, mode, workers);
            py::gil_scoped_release release;
            const auto r = train(c, train_set, test_set);
            py::gil_scoped_acquire acquire;
            return report_dict(r);
        },
        py::arg("ansatz"), py::arg("train_set"), py::arg("test_set"),
        py::arg("encoding") = "amplitude", py::arg("qubits") = 8, py::arg("noise") = py::none(),
        py::arg("p") = 0.0, py::arg("lr") = 0.05, py::arg("epochs") = 200,
        py::arg("batch_size") = 32, py::arg("seed") = 0, py::arg("mode") = "parameter-shift",
        py::arg("workers") = 1);

    m.def(
        "train_baseline",
        [](const std::string &variant, const std::vector<FeatureRecord> &train_set,
           const std::vector<FeatureRecord> &test_set, double lr, std::size_t epochs,
           std::size_t batch_size, std::uint64_t seed) {
            const std::size_t dim = train_set.empty() ? 256 : train_set.front().features.size();
            BaselineConfig c{lr, epochs, batch_size, seed};
            py::gil_scoped_release release;
            const auto r = train_baseline(TinyCnn::build(variant, dim), c, train_set, test_set);
            py::gil_scoped_acquire acquire;
            return report_dict(r);
        },
        py::arg("variant"), py::arg("train_set"), py::arg("test_set"), py::arg("lr") = 0.05,
        py::arg("epochs") = 200, py::arg("batch_size") = 32, py::arg("seed") = 0);

    m.def("cnn_param_count",
          [](const std::string &variant) { return TinyCnn::build(variant).param_count(); });

    m.def("synthesize_gaussians", &synthesize_gaussians, py::arg("dim") = 256,
          py::arg("n_per_class") = 200, py::arg("separation") = 8.0, py::arg("seed") = 0);
    m.def(
        "load_features",
        [](const std::filesystem::path &path) { return load_features(path).records; },
        py::arg("path"));
    m.def(
        "write_features",
        [](const std::vector<FeatureRecord> &records, const std::filesystem::path &path) {
            return write_features(records, path).checksum;
        },
        py::arg("records"), py::arg("path"), "Writes the CSV and returns its checksum.");
    m.def(
        "split",
        [](const std::vector<FeatureRecord> &records, double fraction, std::uint64_t seed) {
            auto s = split(records, fraction, seed);
            return py::make_tuple(s.train, s.test);
        },
        py::arg("records"), py::arg("train_fraction") = 0.8, py::arg("seed") = 0);
    m.def(
        "preprocess",
        [](const std::vector<FeatureRecord> &train_set, const std::vector<FeatureRecord> &other,
           const std::string &encoding, std::size_t qubits) {
            Preprocessor pre({parse_encoding_kind(encoding), qubits});
            pre.fit(train_set);
            return py::make_tuple(pre.apply(train_set).records, pre.apply(other).records);
        },
        py::arg("train_set"), py::arg("other"), py::arg("encoding") = "amplitude",
        py::arg("qubits") = 8, "Fit on train_set and apply to both sets.");

    m.def(
        "conv_unit_entropies",
        [](int conv_id, std::size_t n, std::uint64_t seed) {
            return conv_unit_entropy_sample(conv_id, n, seed).values;
        },
        py::arg("conv_id"), py::arg("n_samples"), py::arg("seed") = 0);
    m.def(
        "layerwise_entropies",
        [](const std::string &ansatz, std::size_t n, std::uint64_t seed) {
            std::vector<std::vector<double>> out;
            for (const auto &s : qcnn_layerwise_entropy_sample(parse_ansatz(ansatz), n, seed)) {
                out.push_back(s.values);
            }
            return out;
        },
        py::arg("ansatz"), py::arg("n_samples"), py::arg("seed") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the qcnnwb driver; returns (exit_code, stdout, stderr).");
}
