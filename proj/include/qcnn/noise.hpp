#pragma once

#include "qcnn/circuit.hpp"
#include "qcnn/state.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qcnn {

enum class NoiseKind { BitFlip, PhaseFlip, AmplitudeDamping, Depolarizing };

/// CLI names: bitflip | phaseflip | ampdamp | depol.
std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Depolarizing;
    double p = 0.0;

    /// Throws std::invalid_argument unless 0 <= p <= 1.
    NoiseSpec(NoiseKind kind, double p);
};

std::vector<ComplexMatrix> kraus_ops(const NoiseSpec &spec);
std::vector<Mat2> kraus_mat2(const NoiseSpec &spec);

/**
 * Apply the channel to one qubit of a density matrix. `active` lists the
 * qubits that may still receive operations; an empty list means all.
 */
DensityMatrix apply_channel(const DensityMatrix &rho, const NoiseSpec &spec, std::size_t qubit,
                            std::span<const std::size_t> active = {});

/// Which noise markers fire for a given circuit family.
struct NoiseFilter {
    bool conv_layers = true;
    bool pool_layers = true;

    [[nodiscard]] bool fires(const LayerTag &tag) const {
        return tag.stage == LayerStage::Conv ? conv_layers : pool_layers;
    }
};

/// Noise channel together with the markers it fires at.
struct NoiseModel {
    NoiseSpec spec;
    NoiseFilter filter;
};

/// Number of markers in `c` that fire under `filter`.
std::size_t count_firing_points(const Circuit &c, const NoiseFilter &filter);

} // namespace qcnn
