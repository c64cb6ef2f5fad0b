#pragma once

#include "qcnn/num_core.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qcnn {

enum class GateKind { H, X, Rx, Ry, Rz, U3, CNOT, CZ, CRx, CRz };

std::string_view to_string(GateKind kind);
/// Number of angles a gate of this kind carries (0, 1 or 3).
std::size_t angle_count(GateKind kind);
bool is_controlled_rotation(GateKind kind);

struct FixedAngle {
    double radians = 0.0;
};
struct ParamSlot {
    std::size_t index = 0;
};
using AngleBinding = std::variant<FixedAngle, ParamSlot>;

/**
 * One gate of a circuit.
 *
 * Single-qubit gates and controlled gates carry one target; CZ carries two
 * targets and no control. Controlled gates name the control separately.
 */
struct GateOp {
    GateKind kind = GateKind::H;
    std::vector<std::size_t> targets;
    std::optional<std::size_t> control;
    std::vector<AngleBinding> angles;

    /// Every qubit the gate touches, control first.
    [[nodiscard]] std::vector<std::size_t> qubits() const;
};

enum class LayerStage { Conv, Pool };

struct LayerTag {
    LayerStage stage = LayerStage::Conv;
    std::size_t layer = 1; // 1-based
    bool operator==(const LayerTag &) const = default;
};

std::string to_string(const LayerTag &tag);

struct NoisePoint {
    LayerTag tag;
};
struct Discard {
    std::size_t qubit = 0;
};
/// Boundary after the last instruction of a QCNN layer (1-based).
struct LayerEnd {
    std::size_t layer = 1;
};

using Instruction = std::variant<GateOp, NoisePoint, Discard, LayerEnd>;

/// Up to three resolved angles of a gate.
struct ResolvedAngles {
    std::array<double, 3> values{};
    std::size_t count = 0;
    [[nodiscard]] std::span<const double> view() const { return {values.data(), count}; }
};

ResolvedAngles resolve_angles(const GateOp &g, std::span<const double> params);

/**
 * Unitary of a gate: 2x2 for single-qubit gates, 4x4 for two-qubit gates in
 * the basis |control, target> (|first, second> for CZ).
 * Rx/Ry/Rz(t) = exp(-i t sigma / 2); U3(t, p, l) = Rz(p) Ry(t) Rz(l).
 */
ComplexMatrix gate_matrix(const GateOp &g, std::span<const double> params);
ComplexMatrix gate_matrix_from_angles(GateKind kind, std::span<const double> angles);

/// Immutable gate program with parameter slots and markers. Built by CircuitBuilder.
class Circuit {
  public:
    Circuit() = default;

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t n_params() const noexcept { return n_params_; }
    [[nodiscard]] std::span<const Instruction> instructions() const noexcept { return ops_; }
    [[nodiscard]] std::size_t size() const noexcept { return ops_.size(); }
    [[nodiscard]] std::size_t gate_count() const;

    /// Qubits not discarded by any marker before position `upto`.
    [[nodiscard]] std::vector<std::size_t> active_qubits(std::size_t upto) const;
    [[nodiscard]] std::vector<std::size_t> active_qubits() const { return active_qubits(size()); }
    /// The single qubit left active at the end; throws if there is not exactly one.
    [[nodiscard]] std::size_t readout_qubit() const;
    /// Position just after the LayerEnd marker for `layer`.
    [[nodiscard]] std::size_t layer_end_position(std::size_t layer) const;
    [[nodiscard]] std::size_t layer_count() const;

    /// One instruction per line; a debugging aid, not a stable format.
    [[nodiscard]] std::string dump() const;

  private:
    friend class CircuitBuilder;
    std::size_t n_qubits_ = 0;
    std::size_t n_params_ = 0;
    std::vector<Instruction> ops_;
};

class CircuitBuilder {
  public:
    CircuitBuilder(std::size_t n_qubits, std::size_t n_params);

    CircuitBuilder &gate(GateOp op);
    CircuitBuilder &h(std::size_t q);
    CircuitBuilder &x(std::size_t q);
    CircuitBuilder &rx(std::size_t q, AngleBinding a);
    CircuitBuilder &ry(std::size_t q, AngleBinding a);
    CircuitBuilder &rz(std::size_t q, AngleBinding a);
    CircuitBuilder &u3(std::size_t q, AngleBinding theta, AngleBinding phi, AngleBinding lambda);
    CircuitBuilder &cnot(std::size_t control, std::size_t target);
    CircuitBuilder &cz(std::size_t a, std::size_t b);
    CircuitBuilder &crx(std::size_t control, std::size_t target, AngleBinding a);
    CircuitBuilder &crz(std::size_t control, std::size_t target, AngleBinding a);

    CircuitBuilder &noise_point(LayerTag tag);
    CircuitBuilder &discard(std::size_t q);
    CircuitBuilder &layer_end(std::size_t layer);

    /**
     * Append `sub` with its qubit i mapped to qubit_map[i] and its slot s
     * mapped to slot_offset + s. Markers are copied only when requested.
     */
    CircuitBuilder &append(const Circuit &sub, std::span<const std::size_t> qubit_map,
                           std::size_t slot_offset, bool with_markers = true);

    [[nodiscard]] bool is_discarded(std::size_t q) const { return discarded_.at(q); }

    /// Validates that every parameter slot is referenced by some gate.
    [[nodiscard]] Circuit build() const;

  private:
    void check_qubit(std::size_t q) const;

    Circuit circuit_;
    std::vector<bool> discarded_;
};

} // namespace qcnn
