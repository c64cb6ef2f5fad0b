#include "qcnn/num_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace qcnn {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw std::invalid_argument("ComplexMatrix: entry count " +
                                    std::to_string(entries_.size()) + " does not match " +
                                    std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_) {
            throw std::invalid_argument("ComplexMatrix: ragged initializer");
        }
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    if (!is_square()) {
        throw std::invalid_argument("trace: matrix is not square");
    }
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    if (!is_square()) {
        return false;
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = r; c < cols_; ++c) {
            if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool ComplexMatrix::all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Complex &z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix &other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("max_abs_diff: dimension mismatch");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
    }
    return worst;
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("matrix addition: dimension mismatch");
    }
    std::transform(entries_.begin(), entries_.end(), other.entries_.begin(), entries_.begin(),
                   std::plus<>());
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("matrix subtraction: dimension mismatch");
    }
    std::transform(entries_.begin(), entries_.end(), other.entries_.begin(), entries_.begin(),
                   std::minus<>());
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex scale) {
    for (auto &z : entries_) {
        z *= scale;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matrix product: inner dimensions differ");
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex lhs = a(r, k);
            if (lhs == Complex{}) {
                continue;
            }
            for (std::size_t c = 0; c < b.cols(); ++c) {
                out(r, c) += lhs * b(k, c);
            }
        }
    }
    return out;
}

namespace mat {

ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix pauli_y() { return {{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}; }
ComplexMatrix pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
ComplexMatrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return {{s, s}, {s, -s}};
}

ComplexMatrix projector(std::span<const Complex> amplitudes) {
    const std::size_t dim = amplitudes.size();
    ComplexMatrix out(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            out(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
        }
    }
    return out;
}

} // namespace mat

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex s = a(ar, ac);
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
                }
            }
        }
    }
    return out;
}

namespace {

// Basis-index offsets obtained by scattering every value of a sub-register
// onto the bit positions of `qubits` (qubit 0 = most significant bit).
std::vector<std::size_t> scatter_table(std::span<const std::size_t> qubits, std::size_t n_qubits) {
    const std::size_t count = std::size_t{1} << qubits.size();
    std::vector<std::size_t> table(count, 0);
    for (std::size_t v = 0; v < count; ++v) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < qubits.size(); ++k) {
            const std::size_t bit = (v >> (qubits.size() - 1 - k)) & 1U;
            idx |= bit << (n_qubits - 1 - qubits[k]);
        }
        table[v] = idx;
    }
    return table;
}

} // namespace

ComplexMatrix partial_trace(const ComplexMatrix &rho, std::size_t n_qubits,
                            std::span<const std::size_t> keep) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    if (rho.rows() != dim || rho.cols() != dim) {
        throw std::invalid_argument("partial_trace: matrix is " + std::to_string(rho.rows()) +
                                    "x" + std::to_string(rho.cols()) + ", expected " +
                                    std::to_string(dim) + "x" + std::to_string(dim));
    }
    if (keep.empty()) {
        throw std::invalid_argument("partial_trace: keep set is empty");
    }
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end() || kept.back() >= n_qubits) {
        throw std::invalid_argument("partial_trace: keep set has duplicates or out-of-range qubits");
    }
    std::vector<std::size_t> traced;
    for (std::size_t q = 0; q < n_qubits; ++q) {
        if (!std::binary_search(kept.begin(), kept.end(), q)) {
            traced.push_back(q);
        }
    }
    const auto keep_idx = scatter_table(kept, n_qubits);
    const auto trace_idx = scatter_table(traced, n_qubits);

    const std::size_t out_dim = keep_idx.size();
    ComplexMatrix out(out_dim, out_dim);
    for (std::size_t r = 0; r < out_dim; ++r) {
        for (std::size_t c = 0; c < out_dim; ++c) {
            Complex acc = 0.0;
            for (const std::size_t e : trace_idx) {
                acc += rho(keep_idx[r] | e, keep_idx[c] | e);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

HermitianSpectrum eig_hermitian_2x2(const ComplexMatrix &m) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw std::invalid_argument("eig_hermitian_2x2: matrix is not 2x2");
    }
    if (!m.is_hermitian(kHermitianTol)) {
        throw std::invalid_argument("eig_hermitian_2x2: matrix is not Hermitian");
    }
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double half_trace = 0.5 * (a + d);
    const double half_gap = 0.5 * (a - d);
    const double off = std::abs(m(0, 1));
    const double radius = std::hypot(half_gap, off);
    return {{half_trace + radius, half_trace - radius}};
}

HermitianSpectrum eig_hermitian(const ComplexMatrix &m) {
    if (m.rows() == 2 && m.cols() == 2) {
        return eig_hermitian_2x2(m);
    }
    if (!m.is_hermitian(kHermitianTol)) {
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    }
    const auto n = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXcd em(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            em(r, c) = m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(em, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: eigensolver did not converge");
    }
    const auto &values = solver.eigenvalues();
    HermitianSpectrum spectrum;
    spectrum.eigenvalues.assign(values.data(), values.data() + values.size());
    std::sort(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(), std::greater<>());
    return spectrum;
}

double trace_distance(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const auto spectrum = eig_hermitian(a - b);
    double norm = 0.0;
    for (const double lambda : spectrum.eigenvalues) {
        norm += std::abs(lambda);
    }
    return 0.5 * norm;
}

} // namespace qcnn
