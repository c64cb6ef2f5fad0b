#pragma once

#include "qcnn/circuit.hpp"
#include "qcnn/noise.hpp"
#include "qcnn/state.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qcnn {

/**
 * Noiseless statevector execution. Noise markers are ignored and discard
 * markers are deferred: the returned state still spans every qubit, and
 * callers read marginals of the qubits that remain active.
 */
StateVector run_statevector(const Circuit &c, std::span<const double> params,
                            const StateVector &input);

/**
 * Full-register density-matrix execution. Discards are lazy (indices stay
 * stable); at every marker the filter fires on, the channel is applied to
 * each qubit that has not been discarded yet.
 */
DensityMatrix run_density(const Circuit &c, std::span<const double> params,
                          const DensityMatrix &input,
                          const std::optional<NoiseModel> &noise = std::nullopt);

/// Single-qubit operator a gate applies (the target operator for controlled gates).
Mat2 gate_mat2(GateKind kind, std::span<const double> angles);

/**
 * Incremental executor used for readout and parameter-shift evaluation.
 *
 * The state stays pure until the first noise marker fires. At that point it
 * is reduced to a density matrix over the qubits that are still active and
 * are not discarded before the next gate: a trace-preserving channel on a
 * qubit that is traced out immediately afterwards has no effect on the rest.
 * From then on discarded qubits are traced out eagerly. Readout marginals are
 * identical to run_density's.
 *
 * Executors are cheap to copy; a copy taken mid-circuit is how shifted
 * evaluations reuse a common prefix. The circuit and parameter storage must
 * outlive the executor.
 */
class Executor {
  public:
    Executor(const Circuit &c, std::span<const double> params, StateVector input,
             std::optional<NoiseModel> noise = std::nullopt);

    [[nodiscard]] std::size_t position() const noexcept { return pos_; }
    [[nodiscard]] bool done() const noexcept { return pos_ >= circuit_->size(); }
    [[nodiscard]] bool is_mixed() const noexcept { return mixed_; }

    /// Apply the instruction at the current position.
    void step();
    /// Apply the gate at the current position with explicit angles.
    void step_with_angles(std::span<const double> angles);
    void run_to(std::size_t position);
    void run_to_end() { run_to(circuit_->size()); }

    /// 2x2 reduced density matrix of an active qubit.
    [[nodiscard]] ComplexMatrix marginal(std::size_t q) const;
    [[nodiscard]] double prob_one(std::size_t q) const;
    /// Pure state; throws once the executor has switched to a density matrix.
    [[nodiscard]] const StateVector &pure_state() const;

  private:
    void apply_gate(const GateOp &g, std::span<const double> angles);
    void fire_noise();
    void become_mixed(const std::vector<std::size_t> &keep);
    void trace_out(std::size_t q);
    [[nodiscard]] std::vector<std::size_t> discarded_before_next_gate() const;

    const Circuit *circuit_;
    std::span<const double> params_;
    std::optional<NoiseModel> noise_;
    std::vector<Mat2> kraus_;
    std::size_t pos_ = 0;
    std::vector<bool> discarded_;

    StateVector pure_;
    bool mixed_ = false;
    ComplexMatrix rho_;
    std::vector<int> local_; // logical qubit -> position in rho_, -1 when traced out
    std::size_t n_live_ = 0;
};

/// Probability of |1> on the circuit's readout qubit.
double readout_probability(const Circuit &c, std::span<const double> params,
                           const StateVector &input,
                           const std::optional<NoiseModel> &noise = std::nullopt);

} // namespace qcnn
