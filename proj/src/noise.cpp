#include "qcnn/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcnn {

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
    case NoiseKind::BitFlip:
        return "bitflip";
    case NoiseKind::PhaseFlip:
        return "phaseflip";
    case NoiseKind::AmplitudeDamping:
        return "ampdamp";
    case NoiseKind::Depolarizing:
        return "depol";
    }
    return "?";
}

NoiseKind parse_noise_kind(std::string_view name) {
    for (const auto kind : {NoiseKind::BitFlip, NoiseKind::PhaseFlip, NoiseKind::AmplitudeDamping,
                            NoiseKind::Depolarizing}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown noise kind '" + std::string(name) +
                                "' (expected bitflip, phaseflip, ampdamp or depol)");
}

NoiseSpec::NoiseSpec(NoiseKind k, double prob) : kind(k), p(prob) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("noise probability must lie in [0, 1], got " +
                                    std::to_string(p));
    }
}

std::vector<ComplexMatrix> kraus_ops(const NoiseSpec &spec) {
    const double p = spec.p;
    const auto id = ComplexMatrix::identity(2);
    switch (spec.kind) {
    case NoiseKind::BitFlip:
        return {std::sqrt(1 - p) * id, std::sqrt(p) * mat::pauli_x()};
    case NoiseKind::PhaseFlip:
        return {std::sqrt(1 - p) * id, std::sqrt(p) * mat::pauli_z()};
    case NoiseKind::AmplitudeDamping:
        return {ComplexMatrix{{1.0, 0.0}, {0.0, std::sqrt(1 - p)}},
                ComplexMatrix{{0.0, std::sqrt(p)}, {0.0, 0.0}}};
    case NoiseKind::Depolarizing: {
        const double s = std::sqrt(p / 3);
        return {std::sqrt(1 - p) * id, s * mat::pauli_x(), s * mat::pauli_y(),
                s * mat::pauli_z()};
    }
    }
    throw std::invalid_argument("unknown noise kind");
}

std::vector<Mat2> kraus_mat2(const NoiseSpec &spec) {
    std::vector<Mat2> out;
    for (const auto &k : kraus_ops(spec)) {
        out.push_back(to_mat2(k));
    }
    return out;
}

DensityMatrix apply_channel(const DensityMatrix &rho, const NoiseSpec &spec, std::size_t qubit,
                            std::span<const std::size_t> active) {
    if (qubit >= rho.n_qubits()) {
        throw std::invalid_argument("apply_channel: qubit out of range");
    }
    if (!active.empty() && std::find(active.begin(), active.end(), qubit) == active.end()) {
        throw std::invalid_argument("apply_channel: qubit " + std::to_string(qubit) +
                                    " is not active");
    }
    DensityMatrix out = rho;
    const auto kraus = kraus_mat2(spec);
    kernels::apply_kraus(out.matrix(), out.n_qubits(), qubit, kraus);
    return out;
}

std::size_t count_firing_points(const Circuit &c, const NoiseFilter &filter) {
    std::size_t count = 0;
    for (const auto &op : c.instructions()) {
        if (const auto *np = std::get_if<NoisePoint>(&op); np && filter.fires(np->tag)) {
            ++count;
        }
    }
    return count;
}

} // namespace qcnn
