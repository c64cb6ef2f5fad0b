#pragma once

#include "qcnn/state.hpp"

#include <span>
#include <string>
#include <string_view>

namespace qcnn {

enum class EncodingKind { Amplitude, Angle, DenseAngle };

std::string_view to_string(EncodingKind kind);
EncodingKind parse_encoding_kind(std::string_view name);

struct EncodingSpec {
    EncodingKind kind = EncodingKind::Amplitude;
    std::size_t n_qubits = 8;

    /// Largest feature dimension accepted (amplitude) or the exact one (angle kinds).
    [[nodiscard]] std::size_t feature_width() const;
    /// Throws unless `dim` is an admissible feature dimension.
    void check_dimension(std::size_t dim) const;
};

/// x / |x|, zero-padded to 2^n amplitudes.
StateVector amplitude_encode(std::span<const double> x, std::size_t n_qubits);
/// Tensor product of Ry(x_i)|0>, one qubit per feature; each x_i must lie in [0, pi).
StateVector angle_encode(std::span<const double> x);
/// Qubit j receives Ry(x_{N/2+j}) Rx(x_j)|0>; N must be even.
StateVector dense_angle_encode(std::span<const double> x);

StateVector encode(const EncodingSpec &spec, std::span<const double> x);

} // namespace qcnn
