#include "qcnn/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcnn {

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::H:
        return "H";
    case GateKind::X:
        return "X";
    case GateKind::Rx:
        return "RX";
    case GateKind::Ry:
        return "RY";
    case GateKind::Rz:
        return "RZ";
    case GateKind::U3:
        return "U3";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::CZ:
        return "CZ";
    case GateKind::CRx:
        return "CRX";
    case GateKind::CRz:
        return "CRZ";
    }
    return "?";
}

std::size_t angle_count(GateKind kind) {
    switch (kind) {
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz:
    case GateKind::CRx:
    case GateKind::CRz:
        return 1;
    case GateKind::U3:
        return 3;
    default:
        return 0;
    }
}

bool is_controlled_rotation(GateKind kind) {
    return kind == GateKind::CRx || kind == GateKind::CRz;
}

namespace {

bool is_controlled(GateKind kind) {
    return kind == GateKind::CNOT || kind == GateKind::CRx || kind == GateKind::CRz;
}

ComplexMatrix controlled(const ComplexMatrix &u) {
    ComplexMatrix out = ComplexMatrix::identity(4);
    out(2, 2) = u(0, 0);
    out(2, 3) = u(0, 1);
    out(3, 2) = u(1, 0);
    out(3, 3) = u(1, 1);
    return out;
}

ComplexMatrix rx(double t) {
    const double c = std::cos(t / 2);
    const double s = std::sin(t / 2);
    return {{c, Complex(0, -s)}, {Complex(0, -s), c}};
}

ComplexMatrix ry(double t) {
    const double c = std::cos(t / 2);
    const double s = std::sin(t / 2);
    return {{c, -s}, {s, c}};
}

ComplexMatrix rz(double t) {
    return {{std::polar(1.0, -t / 2), 0.0}, {0.0, std::polar(1.0, t / 2)}};
}

} // namespace

std::vector<std::size_t> GateOp::qubits() const {
    std::vector<std::size_t> out;
    if (control) {
        out.push_back(*control);
    }
    out.insert(out.end(), targets.begin(), targets.end());
    return out;
}

std::string to_string(const LayerTag &tag) {
    return std::string(tag.stage == LayerStage::Conv ? "conv" : "pool") + "-layer-" +
           std::to_string(tag.layer);
}

ResolvedAngles resolve_angles(const GateOp &g, std::span<const double> params) {
    ResolvedAngles out;
    out.count = g.angles.size();
    for (std::size_t i = 0; i < g.angles.size(); ++i) {
        if (const auto *slot = std::get_if<ParamSlot>(&g.angles[i])) {
            if (slot->index >= params.size()) {
                throw std::invalid_argument("gate " + std::string(to_string(g.kind)) +
                                            " references parameter slot " +
                                            std::to_string(slot->index) + " but only " +
                                            std::to_string(params.size()) + " were supplied");
            }
            out.values[i] = params[slot->index];
        } else {
            out.values[i] = std::get<FixedAngle>(g.angles[i]).radians;
        }
    }
    return out;
}

ComplexMatrix gate_matrix_from_angles(GateKind kind, std::span<const double> angles) {
    if (angles.size() != angle_count(kind)) {
        throw std::invalid_argument("gate " + std::string(to_string(kind)) + " expects " +
                                    std::to_string(angle_count(kind)) + " angles");
    }
    switch (kind) {
    case GateKind::H:
        return mat::hadamard();
    case GateKind::X:
        return mat::pauli_x();
    case GateKind::Rx:
        return rx(angles[0]);
    case GateKind::Ry:
        return ry(angles[0]);
    case GateKind::Rz:
        return rz(angles[0]);
    case GateKind::U3:
        return rz(angles[1]) * ry(angles[0]) * rz(angles[2]);
    case GateKind::CNOT:
        return controlled(mat::pauli_x());
    case GateKind::CZ:
        return controlled(mat::pauli_z());
    case GateKind::CRx:
        return controlled(rx(angles[0]));
    case GateKind::CRz:
        return controlled(rz(angles[0]));
    }
    throw std::invalid_argument("unknown gate kind");
}

ComplexMatrix gate_matrix(const GateOp &g, std::span<const double> params) {
    const auto angles = resolve_angles(g, params);
    return gate_matrix_from_angles(g.kind, angles.view());
}

std::size_t Circuit::gate_count() const {
    return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [](const auto &op) {
        return std::holds_alternative<GateOp>(op);
    }));
}

std::vector<std::size_t> Circuit::active_qubits(std::size_t upto) const {
    if (upto > ops_.size()) {
        throw std::invalid_argument("active_qubits: position past end of circuit");
    }
    std::vector<bool> gone(n_qubits_, false);
    for (std::size_t i = 0; i < upto; ++i) {
        if (const auto *d = std::get_if<Discard>(&ops_[i])) {
            gone[d->qubit] = true;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < n_qubits_; ++q) {
        if (!gone[q]) {
            out.push_back(q);
        }
    }
    return out;
}

std::size_t Circuit::readout_qubit() const {
    const auto active = active_qubits();
    if (active.size() != 1) {
        throw std::logic_error("circuit leaves " + std::to_string(active.size()) +
                               " active qubits; readout needs exactly one");
    }
    return active.front();
}

std::size_t Circuit::layer_end_position(std::size_t layer) const {
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (const auto *end = std::get_if<LayerEnd>(&ops_[i]); end && end->layer == layer) {
            return i + 1;
        }
    }
    throw std::invalid_argument("circuit has no layer " + std::to_string(layer));
}

std::size_t Circuit::layer_count() const {
    return static_cast<std::size_t>(std::count_if(ops_.begin(), ops_.end(), [](const auto &op) {
        return std::holds_alternative<LayerEnd>(op);
    }));
}

std::string Circuit::dump() const {
    std::ostringstream out;
    out << "circuit qubits=" << n_qubits_ << " params=" << n_params_ << '\n';
    for (const auto &op : ops_) {
        std::visit(
            [&out](const auto &v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, GateOp>) {
                    out << to_string(v.kind);
                    if (v.control) {
                        out << " c=" << *v.control;
                    }
                    for (const auto t : v.targets) {
                        out << " q=" << t;
                    }
                    for (const auto &a : v.angles) {
                        if (const auto *slot = std::get_if<ParamSlot>(&a)) {
                            out << " theta[" << slot->index << ']';
                        } else {
                            out << " " << std::get<FixedAngle>(a).radians;
                        }
                    }
                } else if constexpr (std::is_same_v<T, NoisePoint>) {
                    out << "NOISE " << to_string(v.tag);
                } else if constexpr (std::is_same_v<T, Discard>) {
                    out << "DISCARD q=" << v.qubit;
                } else {
                    out << "END layer=" << v.layer;
                }
            },
            op);
        out << '\n';
    }
    return out.str();
}

CircuitBuilder::CircuitBuilder(std::size_t n_qubits, std::size_t n_params)
    : discarded_(n_qubits, false) {
    if (n_qubits == 0) {
        throw std::invalid_argument("circuit needs at least one qubit");
    }
    circuit_.n_qubits_ = n_qubits;
    circuit_.n_params_ = n_params;
}

void CircuitBuilder::check_qubit(std::size_t q) const {
    if (q >= circuit_.n_qubits_) {
        throw std::invalid_argument("qubit " + std::to_string(q) + " out of range for " +
                                    std::to_string(circuit_.n_qubits_) + "-qubit circuit");
    }
    if (discarded_[q]) {
        throw std::invalid_argument("gate touches discarded qubit " + std::to_string(q));
    }
}

CircuitBuilder &CircuitBuilder::gate(GateOp op) {
    const bool two_targets = op.kind == GateKind::CZ;
    if (op.targets.size() != (two_targets ? 2U : 1U)) {
        throw std::invalid_argument("gate " + std::string(to_string(op.kind)) +
                                    " has wrong number of targets");
    }
    if (is_controlled(op.kind) != op.control.has_value()) {
        throw std::invalid_argument("gate " + std::string(to_string(op.kind)) +
                                    (op.control ? " must not" : " must") + " have a control");
    }
    if (op.angles.size() != angle_count(op.kind)) {
        throw std::invalid_argument("gate " + std::string(to_string(op.kind)) + " expects " +
                                    std::to_string(angle_count(op.kind)) + " angles, got " +
                                    std::to_string(op.angles.size()));
    }
    const auto qs = op.qubits();
    for (const auto q : qs) {
        check_qubit(q);
    }
    if (qs.size() == 2 && qs[0] == qs[1]) {
        throw std::invalid_argument("two-qubit gate acts twice on qubit " + std::to_string(qs[0]));
    }
    for (const auto &a : op.angles) {
        if (const auto *slot = std::get_if<ParamSlot>(&a); slot && slot->index >= circuit_.n_params_) {
            throw std::invalid_argument("parameter slot " + std::to_string(slot->index) +
                                        " out of range");
        }
    }
    circuit_.ops_.emplace_back(std::move(op));
    return *this;
}

CircuitBuilder &CircuitBuilder::h(std::size_t q) { return gate({GateKind::H, {q}, {}, {}}); }
CircuitBuilder &CircuitBuilder::x(std::size_t q) { return gate({GateKind::X, {q}, {}, {}}); }
CircuitBuilder &CircuitBuilder::rx(std::size_t q, AngleBinding a) {
    return gate({GateKind::Rx, {q}, {}, {a}});
}
CircuitBuilder &CircuitBuilder::ry(std::size_t q, AngleBinding a) {
    return gate({GateKind::Ry, {q}, {}, {a}});
}
CircuitBuilder &CircuitBuilder::rz(std::size_t q, AngleBinding a) {
    return gate({GateKind::Rz, {q}, {}, {a}});
}
CircuitBuilder &CircuitBuilder::u3(std::size_t q, AngleBinding theta, AngleBinding phi,
                                   AngleBinding lambda) {
    return gate({GateKind::U3, {q}, {}, {theta, phi, lambda}});
}
CircuitBuilder &CircuitBuilder::cnot(std::size_t control, std::size_t target) {
    return gate({GateKind::CNOT, {target}, control, {}});
}
CircuitBuilder &CircuitBuilder::cz(std::size_t a, std::size_t b) {
    return gate({GateKind::CZ, {a, b}, {}, {}});
}
CircuitBuilder &CircuitBuilder::crx(std::size_t control, std::size_t target, AngleBinding a) {
    return gate({GateKind::CRx, {target}, control, {a}});
}
CircuitBuilder &CircuitBuilder::crz(std::size_t control, std::size_t target, AngleBinding a) {
    return gate({GateKind::CRz, {target}, control, {a}});
}

CircuitBuilder &CircuitBuilder::noise_point(LayerTag tag) {
    circuit_.ops_.emplace_back(NoisePoint{tag});
    return *this;
}

CircuitBuilder &CircuitBuilder::discard(std::size_t q) {
    check_qubit(q);
    discarded_[q] = true;
    circuit_.ops_.emplace_back(Discard{q});
    return *this;
}

CircuitBuilder &CircuitBuilder::layer_end(std::size_t layer) {
    circuit_.ops_.emplace_back(LayerEnd{layer});
    return *this;
}

CircuitBuilder &CircuitBuilder::append(const Circuit &sub, std::span<const std::size_t> qubit_map,
                                       std::size_t slot_offset, bool with_markers) {
    if (qubit_map.size() != sub.n_qubits()) {
        throw std::invalid_argument("append: qubit map size differs from sub-circuit width");
    }
    for (const auto &op : sub.instructions()) {
        if (const auto *g = std::get_if<GateOp>(&op)) {
            GateOp mapped = *g;
            for (auto &t : mapped.targets) {
                t = qubit_map[t];
            }
            if (mapped.control) {
                mapped.control = qubit_map[*mapped.control];
            }
            for (auto &a : mapped.angles) {
                if (auto *slot = std::get_if<ParamSlot>(&a)) {
                    slot->index += slot_offset;
                }
            }
            gate(std::move(mapped));
        } else if (with_markers) {
            if (const auto *d = std::get_if<Discard>(&op)) {
                discard(qubit_map[d->qubit]);
            } else {
                circuit_.ops_.push_back(op);
            }
        }
    }
    return *this;
}

Circuit CircuitBuilder::build() const {
    std::vector<bool> referenced(circuit_.n_params_, false);
    for (const auto &op : circuit_.ops_) {
        if (const auto *g = std::get_if<GateOp>(&op)) {
            for (const auto &a : g->angles) {
                if (const auto *slot = std::get_if<ParamSlot>(&a)) {
                    referenced[slot->index] = true;
                }
            }
        }
    }
    const auto unused = std::find(referenced.begin(), referenced.end(), false);
    if (unused != referenced.end()) {
        throw std::invalid_argument("parameter slot " +
                                    std::to_string(unused - referenced.begin()) +
                                    " is not referenced by any gate");
    }
    return circuit_;
}

} // namespace qcnn
