#pragma once

#include "qcnn/circuit.hpp"
#include "qcnn/noise.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcnn {

/// Parameters per convolution unit, indexed by conv id - 1.
inline constexpr std::array<std::size_t, 9> kConvUnitParams = {2, 2, 4, 6, 6, 6, 10, 10, 15};
inline constexpr std::size_t kPoolingUnitParams = 2;

/// One of the 18 QCNN configurations.
struct AnsatzSpec {
    int conv_id = 1;
    bool pooling = false;
    std::size_t n_qubits = 8;

    /// CLI-facing name, e.g. "a3-nopool".
    [[nodiscard]] std::string name() const;
    /// Throws on an unknown conv id or unsupported qubit count.
    void validate() const;
};

/// Parses `a{1..9}-pool` / `a{1..9}-nopool`.
AnsatzSpec parse_ansatz(std::string_view name, std::size_t n_qubits = 8);
/// All 18 specs: a1-pool .. a9-pool, then a1-nopool .. a9-nopool.
std::vector<AnsatzSpec> all_ansatzes(std::size_t n_qubits = 8);

/// Two-qubit convolution unit; qubit 0 is the first of the pair.
Circuit build_conv_unit(int conv_id);
/// Two-qubit pooling unit acting from qubit 0 (discarded) onto qubit 1 (kept).
Circuit build_pooling_unit();

struct PoolPair {
    std::size_t discard;
    std::size_t keep;
};

/// Qubit pairs and pooling pairs of one QCNN layer.
struct LayerPlan {
    std::vector<std::size_t> active;
    std::vector<std::pair<std::size_t, std::size_t>> conv_pairs;
    std::vector<PoolPair> pool_pairs;
    std::vector<std::size_t> survivors;
};

/// Layer-by-layer schedule on an n-qubit register until one qubit remains.
std::vector<LayerPlan> layer_schedule(std::size_t n_qubits);

std::size_t param_count(const AnsatzSpec &spec);
Circuit build_qcnn(const AnsatzSpec &spec);

/// Pooling ansatzes fire at conv and pool markers; no-pooling ones at conv markers only.
NoiseFilter noise_points(const AnsatzSpec &spec);

} // namespace qcnn
