#pragma once

#include "qcnn/ansatz.hpp"
#include "qcnn/num_core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qcnn {

/// Von Neumann entropy in bits of a single-qubit density matrix.
double von_neumann_entropy(const ComplexMatrix &rho_reduced);

struct Histogram {
    std::vector<double> edges; // bins + 1 edges over [0, 1]
    std::vector<std::size_t> counts;
};

struct EntropySample {
    std::string id;
    std::vector<double> values; // bits
    double mean = 0.0;
    double std = 0.0; // population standard deviation

    [[nodiscard]] Histogram histogram(std::size_t bins) const;
};

EntropySample make_entropy_sample(std::string id, std::vector<double> values);

/**
 * Entropy of qubit a's marginal after the conv unit acts on |00> with
 * parameters drawn uniformly from [0, 2pi). Sample i draws from a stream
 * derived from (seed, i), so results do not depend on the worker count.
 */
EntropySample conv_unit_entropy_sample(int conv_id, std::size_t n_samples, std::uint64_t seed,
                                       std::size_t workers = 1);

/// Entropy of one conv unit on |00> at fixed parameters.
double conv_unit_entropy(int conv_id, std::span<const double> params);

/**
 * Per-layer entropy of the classification qubit for random QCNN parameters,
 * run noiselessly from |0...0>. Element k of the result is layer k + 1.
 */
std::vector<EntropySample> qcnn_layerwise_entropy_sample(const AnsatzSpec &spec,
                                                         std::size_t n_samples,
                                                         std::uint64_t seed,
                                                         std::size_t workers = 1);

/// Layer entropies of the classification qubit at fixed parameters.
std::vector<double> qcnn_layer_entropies(const Circuit &qcnn, std::span<const double> params);

/// CSV with header `bin_lo,bin_hi,count`.
void export_histogram(const EntropySample &sample, std::size_t bins,
                      const std::filesystem::path &path);

} // namespace qcnn
