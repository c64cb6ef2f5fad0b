#pragma once

#include "qcnn/num_core.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace qcnn {

/// 2x2 operator in row-major order.
using Mat2 = std::array<Complex, 4>;

Mat2 to_mat2(const ComplexMatrix &m);
ComplexMatrix to_matrix(const Mat2 &m);

/**
 * Strided in-place kernels over n-qubit index spaces.
 *
 * `data` holds 2^n elements of `block` consecutive values each; element i
 * corresponds to basis index i with qubit 0 as the most significant bit.
 * block = 1 is a statevector; block = 2^n acts on the row index of a
 * row-major density matrix.
 */
namespace kernels {

void apply_1q(std::span<Complex> data, std::size_t n, std::size_t q, const Mat2 &m,
              std::size_t block = 1);
/// Applies `m` to `target` on the subspace where `control` is |1>.
void apply_controlled_1q(std::span<Complex> data, std::size_t n, std::size_t control,
                         std::size_t target, const Mat2 &m, std::size_t block = 1);

/// rho -> U rho U^dagger for a single-qubit U.
void conjugate_1q(ComplexMatrix &rho, std::size_t n, std::size_t q, const Mat2 &u);
void conjugate_controlled_1q(ComplexMatrix &rho, std::size_t n, std::size_t control,
                             std::size_t target, const Mat2 &u);
/// rho -> sum_k K rho K^dagger on one qubit.
void apply_kraus(ComplexMatrix &rho, std::size_t n, std::size_t q, std::span<const Mat2> kraus);

/// Reduced density matrix of a pure state on the (ascending) qubits in `keep`.
ComplexMatrix reduced_from_pure(std::span<const Complex> amplitudes, std::size_t n,
                                std::span<const std::size_t> keep);
/// Trace out a single qubit of an n-qubit density matrix.
ComplexMatrix trace_out_qubit(const ComplexMatrix &rho, std::size_t n, std::size_t q);

} // namespace kernels

/// Pure n-qubit state; constructors enforce unit norm within 1e-9.
class StateVector {
  public:
    /// |0...0>
    explicit StateVector(std::size_t n_qubits);
    StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes);
    static StateVector basis(std::size_t n_qubits, std::size_t index);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }
    const Complex &operator[](std::size_t i) const { return amps_[i]; }
    [[nodiscard]] double norm() const;

    /// Single-qubit reduced density matrix.
    [[nodiscard]] ComplexMatrix marginal(std::size_t q) const;
    [[nodiscard]] ComplexMatrix projector() const { return mat::projector(amps_); }

  private:
    std::size_t n_qubits_;
    std::vector<Complex> amps_;
};

/// Mixed n-qubit state; the checked constructor enforces Hermiticity and unit trace.
class DensityMatrix {
  public:
    explicit DensityMatrix(const StateVector &pure);
    DensityMatrix(std::size_t n_qubits, ComplexMatrix matrix);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return rho_; }
    [[nodiscard]] ComplexMatrix &matrix() noexcept { return rho_; }
    [[nodiscard]] ComplexMatrix marginal(std::size_t q) const;

  private:
    std::size_t n_qubits_;
    ComplexMatrix rho_;
};

} // namespace qcnn
