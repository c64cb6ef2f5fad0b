#include "qcnn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcnn {

Mat2 gate_mat2(GateKind kind, std::span<const double> angles) {
    auto half = [&](std::size_t i) { return 0.5 * angles[i]; };
    switch (kind) {
    case GateKind::H: {
        const double s = 1.0 / std::sqrt(2.0);
        return {s, s, s, -s};
    }
    case GateKind::X:
    case GateKind::CNOT:
        return {0.0, 1.0, 1.0, 0.0};
    case GateKind::CZ:
        return {1.0, 0.0, 0.0, -1.0};
    case GateKind::Rx:
    case GateKind::CRx: {
        const double c = std::cos(half(0));
        const double s = std::sin(half(0));
        return {c, Complex(0, -s), Complex(0, -s), c};
    }
    case GateKind::Ry: {
        const double c = std::cos(half(0));
        const double s = std::sin(half(0));
        return {c, -s, s, c};
    }
    case GateKind::Rz:
    case GateKind::CRz:
        return {std::polar(1.0, -half(0)), 0.0, 0.0, std::polar(1.0, half(0))};
    case GateKind::U3: {
        // Rz(phi) Ry(theta) Rz(lambda)
        const double c = std::cos(half(0));
        const double s = std::sin(half(0));
        const double sum = half(1) + half(2);
        const double diff = half(1) - half(2);
        return {std::polar(c, -sum), -std::polar(s, -diff), std::polar(s, diff),
                std::polar(c, sum)};
    }
    }
    throw std::invalid_argument("gate_mat2: unknown gate kind");
}

namespace {

void check_params(const Circuit &c, std::span<const double> params) {
    if (params.size() != c.n_params()) {
        throw std::invalid_argument("circuit expects " + std::to_string(c.n_params()) +
                                    " parameters, got " + std::to_string(params.size()));
    }
}

// Control/target pair for two-qubit gates (CZ is symmetric).
std::pair<std::size_t, std::size_t> control_target(const GateOp &g) {
    if (g.kind == GateKind::CZ) {
        return {g.targets[0], g.targets[1]};
    }
    return {*g.control, g.targets[0]};
}

bool is_two_qubit(const GateOp &g) { return g.control.has_value() || g.targets.size() == 2; }

} // namespace

StateVector run_statevector(const Circuit &c, std::span<const double> params,
                            const StateVector &input) {
    if (input.n_qubits() != c.n_qubits()) {
        throw std::invalid_argument("run_statevector: input has " +
                                    std::to_string(input.n_qubits()) + " qubits, circuit has " +
                                    std::to_string(c.n_qubits()));
    }
    Executor exec(c, params, input);
    exec.run_to_end();
    return exec.pure_state();
}

DensityMatrix run_density(const Circuit &c, std::span<const double> params,
                          const DensityMatrix &input, const std::optional<NoiseModel> &noise) {
    if (input.n_qubits() != c.n_qubits()) {
        throw std::invalid_argument("run_density: input has " + std::to_string(input.n_qubits()) +
                                    " qubits, circuit has " + std::to_string(c.n_qubits()));
    }
    check_params(c, params);
    const std::size_t n = c.n_qubits();
    ComplexMatrix rho = input.matrix();
    std::vector<bool> discarded(n, false);
    std::vector<Mat2> kraus;
    if (noise) {
        kraus = kraus_mat2(noise->spec);
    }
    for (const auto &op : c.instructions()) {
        if (const auto *g = std::get_if<GateOp>(&op)) {
            const auto angles = resolve_angles(*g, params);
            const Mat2 m = gate_mat2(g->kind, angles.view());
            if (is_two_qubit(*g)) {
                const auto [ctrl, tgt] = control_target(*g);
                kernels::conjugate_controlled_1q(rho, n, ctrl, tgt, m);
            } else {
                kernels::conjugate_1q(rho, n, g->targets[0], m);
            }
        } else if (const auto *np = std::get_if<NoisePoint>(&op)) {
            if (noise && noise->filter.fires(np->tag)) {
                for (std::size_t q = 0; q < n; ++q) {
                    if (!discarded[q]) {
                        kernels::apply_kraus(rho, n, q, kraus);
                    }
                }
            }
        } else if (const auto *d = std::get_if<Discard>(&op)) {
            discarded[d->qubit] = true;
        }
    }
    return DensityMatrix(n, std::move(rho));
}

Executor::Executor(const Circuit &c, std::span<const double> params, StateVector input,
                   std::optional<NoiseModel> noise)
    : circuit_(&c), params_(params), noise_(std::move(noise)), discarded_(c.n_qubits(), false),
      pure_(std::move(input)) {
    check_params(c, params);
    if (pure_.n_qubits() != c.n_qubits()) {
        throw std::invalid_argument("Executor: input has " + std::to_string(pure_.n_qubits()) +
                                    " qubits, circuit has " + std::to_string(c.n_qubits()));
    }
    if (noise_) {
        kraus_ = kraus_mat2(noise_->spec);
    }
}

void Executor::step() {
    const auto &op = circuit_->instructions()[pos_];
    if (const auto *g = std::get_if<GateOp>(&op)) {
        const auto angles = resolve_angles(*g, params_);
        apply_gate(*g, angles.view());
    } else if (const auto *np = std::get_if<NoisePoint>(&op)) {
        if (noise_ && noise_->filter.fires(np->tag)) {
            fire_noise();
        }
    } else if (const auto *d = std::get_if<Discard>(&op)) {
        discarded_[d->qubit] = true;
        if (mixed_ && local_[d->qubit] >= 0) {
            trace_out(d->qubit);
        }
    }
    ++pos_;
}

void Executor::step_with_angles(std::span<const double> angles) {
    const auto *g = std::get_if<GateOp>(&circuit_->instructions()[pos_]);
    if (g == nullptr) {
        throw std::logic_error("step_with_angles: current instruction is not a gate");
    }
    if (angles.size() != g->angles.size()) {
        throw std::invalid_argument("step_with_angles: wrong angle count");
    }
    apply_gate(*g, angles);
    ++pos_;
}

void Executor::run_to(std::size_t position) {
    if (position > circuit_->size()) {
        throw std::invalid_argument("Executor::run_to: position past end of circuit");
    }
    while (pos_ < position) {
        step();
    }
}

void Executor::apply_gate(const GateOp &g, std::span<const double> angles) {
    const Mat2 m = gate_mat2(g.kind, angles);
    const std::size_t n = circuit_->n_qubits();
    if (!mixed_) {
        if (is_two_qubit(g)) {
            const auto [ctrl, tgt] = control_target(g);
            kernels::apply_controlled_1q(pure_.amplitudes(), n, ctrl, tgt, m);
        } else {
            kernels::apply_1q(pure_.amplitudes(), n, g.targets[0], m);
        }
        return;
    }
    auto local = [this](std::size_t q) {
        const int l = local_[q];
        if (l < 0) {
            throw std::logic_error("gate on traced-out qubit " + std::to_string(q));
        }
        return static_cast<std::size_t>(l);
    };
    if (is_two_qubit(g)) {
        const auto [ctrl, tgt] = control_target(g);
        kernels::conjugate_controlled_1q(rho_, n_live_, local(ctrl), local(tgt), m);
    } else {
        kernels::conjugate_1q(rho_, n_live_, local(g.targets[0]), m);
    }
}

std::vector<std::size_t> Executor::discarded_before_next_gate() const {
    std::vector<std::size_t> out;
    const auto ops = circuit_->instructions();
    for (std::size_t i = pos_ + 1; i < ops.size(); ++i) {
        if (std::holds_alternative<GateOp>(ops[i])) {
            break;
        }
        if (const auto *d = std::get_if<Discard>(&ops[i])) {
            out.push_back(d->qubit);
        }
    }
    return out;
}

void Executor::become_mixed(const std::vector<std::size_t> &keep) {
    if (keep.empty()) {
        throw std::logic_error("noise fired with no qubits left to keep");
    }
    rho_ = kernels::reduced_from_pure(pure_.amplitudes(), circuit_->n_qubits(), keep);
    local_.assign(circuit_->n_qubits(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        local_[keep[i]] = static_cast<int>(i);
    }
    n_live_ = keep.size();
    mixed_ = true;
}

void Executor::trace_out(std::size_t q) {
    const auto l = static_cast<std::size_t>(local_[q]);
    rho_ = kernels::trace_out_qubit(rho_, n_live_, l);
    local_[q] = -1;
    for (auto &other : local_) {
        if (other > static_cast<int>(l)) {
            --other;
        }
    }
    --n_live_;
}

void Executor::fire_noise() {
    const auto leaving = discarded_before_next_gate();
    auto is_leaving = [&](std::size_t q) {
        return std::find(leaving.begin(), leaving.end(), q) != leaving.end();
    };
    if (!mixed_) {
        std::vector<std::size_t> keep;
        for (std::size_t q = 0; q < circuit_->n_qubits(); ++q) {
            if (!discarded_[q] && !is_leaving(q)) {
                keep.push_back(q);
            }
        }
        become_mixed(keep);
    } else {
        for (const auto q : leaving) {
            if (local_[q] >= 0) {
                trace_out(q);
            }
        }
    }
    for (std::size_t q = 0; q < local_.size(); ++q) {
        if (local_[q] >= 0) {
            kernels::apply_kraus(rho_, n_live_, static_cast<std::size_t>(local_[q]), kraus_);
        }
    }
}

ComplexMatrix Executor::marginal(std::size_t q) const {
    if (q >= circuit_->n_qubits()) {
        throw std::invalid_argument("marginal: qubit out of range");
    }
    if (!mixed_) {
        return pure_.marginal(q);
    }
    if (local_[q] < 0) {
        throw std::invalid_argument("marginal: qubit " + std::to_string(q) +
                                    " has been traced out");
    }
    const std::size_t keep[] = {static_cast<std::size_t>(local_[q])};
    return partial_trace(rho_, n_live_, keep);
}

double Executor::prob_one(std::size_t q) const {
    if (!mixed_) {
        const std::size_t n = circuit_->n_qubits();
        if (q >= n) {
            throw std::invalid_argument("prob_one: qubit out of range");
        }
        const std::size_t bit = std::size_t{1} << (n - 1 - q);
        double p = 0.0;
        const auto amps = pure_.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (i & bit) {
                p += std::norm(amps[i]);
            }
        }
        return p;
    }
    return marginal(q)(1, 1).real();
}

const StateVector &Executor::pure_state() const {
    if (mixed_) {
        throw std::logic_error("Executor holds a mixed state");
    }
    return pure_;
}

double readout_probability(const Circuit &c, std::span<const double> params,
                           const StateVector &input, const std::optional<NoiseModel> &noise) {
    Executor exec(c, params, input, noise);
    exec.run_to_end();
    return exec.prob_one(c.readout_qubit());
}

} // namespace qcnn
