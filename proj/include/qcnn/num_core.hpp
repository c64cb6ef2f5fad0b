#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qcnn {

using Complex = std::complex<double>;

/// Tolerance used for every Hermiticity check in the library.
inline constexpr double kHermitianTol = 1e-9;

/// Dense complex matrix stored row-major.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    Complex &operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const {
        return entries_[r * cols_ + c];
    }

    [[nodiscard]] std::span<Complex> entries() noexcept { return entries_; }
    [[nodiscard]] std::span<const Complex> entries() const noexcept { return entries_; }
    [[nodiscard]] std::span<Complex> row(std::size_t r) {
        return std::span<Complex>(entries_).subspan(r * cols_, cols_);
    }

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] Complex trace() const;
    [[nodiscard]] bool is_hermitian(double tol = kHermitianTol) const;
    [[nodiscard]] bool all_finite() const;
    /// Largest element-wise modulus of (this - other); dimensions must agree.
    [[nodiscard]] double max_abs_diff(const ComplexMatrix &other) const;

    ComplexMatrix &operator+=(const ComplexMatrix &other);
    ComplexMatrix &operator-=(const ComplexMatrix &other);
    ComplexMatrix &operator*=(Complex scale);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

/// Real eigenvalues of a Hermitian matrix, descending.
struct HermitianSpectrum {
    std::vector<double> eigenvalues;
};

namespace mat {
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
/// |psi><psi| for an amplitude vector.
ComplexMatrix projector(std::span<const Complex> amplitudes);
} // namespace mat

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/**
 * Reduced density matrix on the qubits listed in `keep`.
 *
 * Qubit 0 is the most significant bit of the basis index. The kept qubits
 * appear in the result in ascending index order, whatever order `keep` lists
 * them in.
 */
ComplexMatrix partial_trace(const ComplexMatrix &rho, std::size_t n_qubits,
                            std::span<const std::size_t> keep);

/// Closed-form spectrum of a 2x2 Hermitian matrix.
HermitianSpectrum eig_hermitian_2x2(const ComplexMatrix &m);

/// Spectrum of an arbitrary Hermitian matrix (2x2 closed form, otherwise Eigen).
HermitianSpectrum eig_hermitian(const ComplexMatrix &m);

/// Half the trace norm of (a - b).
double trace_distance(const ComplexMatrix &a, const ComplexMatrix &b);

} // namespace qcnn
