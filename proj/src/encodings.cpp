#include "qcnn/encodings.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qcnn {

std::string_view to_string(EncodingKind kind) {
    switch (kind) {
    case EncodingKind::Amplitude:
        return "amplitude";
    case EncodingKind::Angle:
        return "angle";
    case EncodingKind::DenseAngle:
        return "dense-angle";
    }
    return "?";
}

EncodingKind parse_encoding_kind(std::string_view name) {
    for (const auto kind : {EncodingKind::Amplitude, EncodingKind::Angle, EncodingKind::DenseAngle}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown encoding '" + std::string(name) +
                                "' (expected amplitude, angle or dense-angle)");
}

std::size_t EncodingSpec::feature_width() const {
    switch (kind) {
    case EncodingKind::Amplitude:
        return std::size_t{1} << n_qubits;
    case EncodingKind::Angle:
        return n_qubits;
    case EncodingKind::DenseAngle:
        return 2 * n_qubits;
    }
    return 0;
}

void EncodingSpec::check_dimension(std::size_t dim) const {
    const std::size_t width = feature_width();
    const bool ok = kind == EncodingKind::Amplitude ? (dim >= 1 && dim <= width) : dim == width;
    if (!ok) {
        throw std::invalid_argument(std::string(to_string(kind)) + " encoding on " +
                                    std::to_string(n_qubits) + " qubits cannot take " +
                                    std::to_string(dim) + " features");
    }
}

StateVector amplitude_encode(std::span<const double> x, std::size_t n_qubits) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (x.size() > dim) {
        throw std::invalid_argument("amplitude_encode: " + std::to_string(x.size()) +
                                    " features do not fit in " + std::to_string(n_qubits) +
                                    " qubits");
    }
    double sq = 0.0;
    for (const double v : x) {
        sq += v * v;
    }
    if (!(sq > 0.0) || !std::isfinite(sq)) {
        throw std::invalid_argument("amplitude_encode: feature vector has zero or non-finite norm");
    }
    const double inv = 1.0 / std::sqrt(sq);
    std::vector<Complex> amps(dim);
    for (std::size_t i = 0; i < x.size(); ++i) {
        amps[i] = x[i] * inv;
    }
    return StateVector(n_qubits, std::move(amps));
}

namespace {

// Tensor product of single-qubit states, first factor = qubit 0.
StateVector product_state(const std::vector<std::array<Complex, 2>> &factors) {
    std::vector<Complex> amps{1.0};
    for (const auto &f : factors) {
        std::vector<Complex> next(amps.size() * 2);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            next[2 * i] = amps[i] * f[0];
            next[2 * i + 1] = amps[i] * f[1];
        }
        amps = std::move(next);
    }
    return StateVector(factors.size(), std::move(amps));
}

} // namespace

StateVector angle_encode(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("angle_encode: empty feature vector");
    }
    std::vector<std::array<Complex, 2>> factors;
    factors.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0 && x[i] < std::numbers::pi)) {
            throw std::invalid_argument("angle_encode: feature " + std::to_string(i) + " = " +
                                        std::to_string(x[i]) + " lies outside [0, pi)");
        }
        factors.push_back({std::cos(x[i] / 2), std::sin(x[i] / 2)});
    }
    return product_state(factors);
}

StateVector dense_angle_encode(std::span<const double> x) {
    if (x.empty() || x.size() % 2 != 0) {
        throw std::invalid_argument("dense_angle_encode: feature count must be even and nonzero, got " +
                                    std::to_string(x.size()));
    }
    const std::size_t half = x.size() / 2;
    std::vector<std::array<Complex, 2>> factors;
    factors.reserve(half);
    for (std::size_t j = 0; j < half; ++j) {
        // Rx(a)|0> = (cos a/2, -i sin a/2); then Ry(b).
        const double a = x[j];
        const double b = x[half + j];
        const Complex v0 = std::cos(a / 2);
        const Complex v1 = Complex(0, -std::sin(a / 2));
        const double cb = std::cos(b / 2);
        const double sb = std::sin(b / 2);
        factors.push_back({cb * v0 - sb * v1, sb * v0 + cb * v1});
    }
    return product_state(factors);
}

StateVector encode(const EncodingSpec &spec, std::span<const double> x) {
    spec.check_dimension(x.size());
    switch (spec.kind) {
    case EncodingKind::Amplitude:
        return amplitude_encode(x, spec.n_qubits);
    case EncodingKind::Angle:
        return angle_encode(x);
    case EncodingKind::DenseAngle:
        return dense_angle_encode(x);
    }
    throw std::invalid_argument("unknown encoding kind");
}

} // namespace qcnn
