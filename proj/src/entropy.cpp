#include "qcnn/entropy.hpp"

#include "qcnn/simulate.hpp"
#include "qcnn/util.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcnn {

double von_neumann_entropy(const ComplexMatrix &rho_reduced) {
    if (rho_reduced.rows() != 2 || rho_reduced.cols() != 2) {
        throw std::invalid_argument("von_neumann_entropy: expected a 2x2 density matrix");
    }
    if (std::abs(rho_reduced.trace() - Complex(1.0)) > 1e-9) {
        throw std::invalid_argument("von_neumann_entropy: trace is not 1");
    }
    const auto spectrum = eig_hermitian_2x2(rho_reduced);
    double entropy = 0.0;
    for (const double raw : spectrum.eigenvalues) {
        if (raw < -1e-9 || raw > 1.0 + 1e-9) {
            throw std::invalid_argument("von_neumann_entropy: eigenvalue " + std::to_string(raw) +
                                        " outside [0, 1]");
        }
        const double lambda = std::clamp(raw, 0.0, 1.0);
        if (lambda > 1e-12) {
            entropy -= lambda * std::log2(lambda);
        }
    }
    return entropy;
}

Histogram EntropySample::histogram(std::size_t bins) const {
    if (bins < 2) {
        throw std::invalid_argument("histogram needs at least 2 bins");
    }
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = static_cast<double>(i) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0);
    for (const double v : values) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        auto bin = static_cast<std::size_t>(clamped * static_cast<double>(bins));
        h.counts[std::min(bin, bins - 1)] += 1;
    }
    return h;
}

EntropySample make_entropy_sample(std::string id, std::vector<double> values) {
    EntropySample s;
    s.id = std::move(id);
    s.values = std::move(values);
    if (!s.values.empty()) {
        const double n = static_cast<double>(s.values.size());
        s.mean = pairwise_sum(s.values) / n;
        std::vector<double> sq(s.values.size());
        std::transform(s.values.begin(), s.values.end(), sq.begin(),
                       [&](double v) { return (v - s.mean) * (v - s.mean); });
        s.std = std::sqrt(pairwise_sum(sq) / n);
    }
    return s;
}

namespace {

std::vector<double> draw_angles(std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> out(count);
    for (auto &v : out) {
        v = kTwoPi * rng.uniform();
    }
    return out;
}

} // namespace

double conv_unit_entropy(int conv_id, std::span<const double> params) {
    const Circuit unit = build_conv_unit(conv_id);
    const StateVector out = run_statevector(unit, params, StateVector(2));
    return von_neumann_entropy(out.marginal(0));
}

EntropySample conv_unit_entropy_sample(int conv_id, std::size_t n_samples, std::uint64_t seed,
                                       std::size_t workers) {
    const Circuit unit = build_conv_unit(conv_id);
    std::vector<double> values(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t i) {
        const auto params = draw_angles(unit.n_params(), derive_seed(seed, 1, i));
        const StateVector out = run_statevector(unit, params, StateVector(2));
        values[i] = von_neumann_entropy(out.marginal(0));
    });
    return make_entropy_sample("conv" + std::to_string(conv_id), std::move(values));
}

std::vector<double> qcnn_layer_entropies(const Circuit &qcnn, std::span<const double> params) {
    const std::size_t readout = qcnn.readout_qubit();
    Executor exec(qcnn, params, StateVector(qcnn.n_qubits()));
    std::vector<double> out;
    for (std::size_t layer = 1; layer <= qcnn.layer_count(); ++layer) {
        exec.run_to(qcnn.layer_end_position(layer));
        out.push_back(von_neumann_entropy(exec.marginal(readout)));
    }
    return out;
}

std::vector<EntropySample> qcnn_layerwise_entropy_sample(const AnsatzSpec &spec,
                                                         std::size_t n_samples,
                                                         std::uint64_t seed,
                                                         std::size_t workers) {
    const Circuit qcnn = build_qcnn(spec);
    const std::size_t layers = qcnn.layer_count();
    std::vector<std::vector<double>> per_sample(n_samples);
    parallel_for(n_samples, workers, [&](std::size_t i) {
        const auto params = draw_angles(qcnn.n_params(), derive_seed(seed, 2, i));
        per_sample[i] = qcnn_layer_entropies(qcnn, params);
    });
    std::vector<EntropySample> out;
    for (std::size_t layer = 0; layer < layers; ++layer) {
        std::vector<double> values(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) {
            values[i] = per_sample[i][layer];
        }
        out.push_back(make_entropy_sample(spec.name() + "/layer" + std::to_string(layer + 1),
                                          std::move(values)));
    }
    return out;
}

void export_histogram(const EntropySample &sample, std::size_t bins,
                      const std::filesystem::path &path) {
    const Histogram h = sample.histogram(bins);
    std::ostringstream out;
    out.precision(17);
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < bins; ++i) {
        out << h.edges[i] << ',' << h.edges[i + 1] << ',' << h.counts[i] << '\n';
    }
    write_file_atomic(path, out.str());
}

} // namespace qcnn
