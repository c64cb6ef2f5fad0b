#include "qcnn/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qcnn {

Mat2 to_mat2(const ComplexMatrix &m) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw std::invalid_argument("to_mat2: matrix is not 2x2");
    }
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

ComplexMatrix to_matrix(const Mat2 &m) { return {{m[0], m[1]}, {m[2], m[3]}}; }

namespace kernels {

namespace {

Mat2 conj(const Mat2 &m) {
    return {std::conj(m[0]), std::conj(m[1]), std::conj(m[2]), std::conj(m[3])};
}

// Plain complex product; operator* takes a slow path for NaN/Inf recovery.
inline Complex mul(const Complex &a, const Complex &b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

std::size_t bit_of(std::size_t n, std::size_t q) { return std::size_t{1} << (n - 1 - q); }

void check_qubit(std::size_t n, std::size_t q) {
    if (q >= n) {
        throw std::invalid_argument("qubit " + std::to_string(q) + " out of range for " +
                                    std::to_string(n) + " qubits");
    }
}

// Shared body of apply_1q / apply_controlled_1q: visit every index pair
// (i0, i0 | bit) whose index satisfies `mask_required`.
void apply_pairs(std::span<Complex> data, std::size_t n, std::size_t bit,
                 std::size_t mask_required, const Mat2 &m, std::size_t block) {
    const std::size_t dim = std::size_t{1} << n;
    const bool diagonal = m[1] == Complex{} && m[2] == Complex{};
    const bool flip = m[0] == Complex{} && m[3] == Complex{} && m[1] == Complex{1.0} &&
                      m[2] == Complex{1.0};
    for (std::size_t base = 0; base < dim; base += 2 * bit) {
        for (std::size_t i0 = base; i0 < base + bit; ++i0) {
            if ((i0 & mask_required) != mask_required) {
                continue;
            }
            Complex *a = data.data() + i0 * block;
            Complex *b = data.data() + (i0 | bit) * block;
            if (flip) {
                std::swap_ranges(a, a + block, b);
            } else if (diagonal) {
                for (std::size_t k = 0; k < block; ++k) {
                    a[k] = mul(a[k], m[0]);
                    b[k] = mul(b[k], m[3]);
                }
            } else {
                for (std::size_t k = 0; k < block; ++k) {
                    const Complex x = a[k];
                    const Complex y = b[k];
                    a[k] = mul(m[0], x) + mul(m[1], y);
                    b[k] = mul(m[2], x) + mul(m[3], y);
                }
            }
        }
    }
}

} // namespace

void apply_1q(std::span<Complex> data, std::size_t n, std::size_t q, const Mat2 &m,
              std::size_t block) {
    check_qubit(n, q);
    apply_pairs(data, n, bit_of(n, q), 0, m, block);
}

void apply_controlled_1q(std::span<Complex> data, std::size_t n, std::size_t control,
                         std::size_t target, const Mat2 &m, std::size_t block) {
    check_qubit(n, control);
    check_qubit(n, target);
    apply_pairs(data, n, bit_of(n, target), bit_of(n, control), m, block);
}

void conjugate_1q(ComplexMatrix &rho, std::size_t n, std::size_t q, const Mat2 &u) {
    const std::size_t dim = rho.rows();
    apply_1q(rho.entries(), n, q, u, dim);
    const Mat2 uc = conj(u);
    for (std::size_t r = 0; r < dim; ++r) {
        apply_1q(rho.row(r), n, q, uc, 1);
    }
}

void conjugate_controlled_1q(ComplexMatrix &rho, std::size_t n, std::size_t control,
                             std::size_t target, const Mat2 &u) {
    const std::size_t dim = rho.rows();
    apply_controlled_1q(rho.entries(), n, control, target, u, dim);
    const Mat2 uc = conj(u);
    for (std::size_t r = 0; r < dim; ++r) {
        apply_controlled_1q(rho.row(r), n, control, target, uc, 1);
    }
}

void apply_kraus(ComplexMatrix &rho, std::size_t n, std::size_t q, std::span<const Mat2> kraus) {
    check_qubit(n, q);
    const std::size_t dim = rho.rows();
    const std::size_t bit = bit_of(n, q);
    for (std::size_t r0 = 0; r0 < dim; ++r0) {
        if (r0 & bit) {
            continue;
        }
        const std::size_t r1 = r0 | bit;
        for (std::size_t c0 = 0; c0 < dim; ++c0) {
            if (c0 & bit) {
                continue;
            }
            const std::size_t c1 = c0 | bit;
            const Complex b00 = rho(r0, c0);
            const Complex b01 = rho(r0, c1);
            const Complex b10 = rho(r1, c0);
            const Complex b11 = rho(r1, c1);
            Complex n00 = 0.0;
            Complex n01 = 0.0;
            Complex n10 = 0.0;
            Complex n11 = 0.0;
            for (const Mat2 &k : kraus) {
                // t = K * B
                const Complex t00 = mul(k[0], b00) + mul(k[1], b10);
                const Complex t01 = mul(k[0], b01) + mul(k[1], b11);
                const Complex t10 = mul(k[2], b00) + mul(k[3], b10);
                const Complex t11 = mul(k[2], b01) + mul(k[3], b11);
                // t * K^dagger
                n00 += mul(t00, std::conj(k[0])) + mul(t01, std::conj(k[1]));
                n01 += mul(t00, std::conj(k[2])) + mul(t01, std::conj(k[3]));
                n10 += mul(t10, std::conj(k[0])) + mul(t11, std::conj(k[1]));
                n11 += mul(t10, std::conj(k[2])) + mul(t11, std::conj(k[3]));
            }
            rho(r0, c0) = n00;
            rho(r0, c1) = n01;
            rho(r1, c0) = n10;
            rho(r1, c1) = n11;
        }
    }
}

ComplexMatrix reduced_from_pure(std::span<const Complex> amplitudes, std::size_t n,
                                std::span<const std::size_t> keep) {
    if (amplitudes.size() != (std::size_t{1} << n)) {
        throw std::invalid_argument("reduced_from_pure: amplitude count does not match qubits");
    }
    if (keep.empty()) {
        throw std::invalid_argument("reduced_from_pure: keep set is empty");
    }
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    std::vector<std::size_t> traced;
    for (std::size_t q = 0; q < n; ++q) {
        if (!std::binary_search(kept.begin(), kept.end(), q)) {
            traced.push_back(q);
        }
    }
    auto scatter = [n](const std::vector<std::size_t> &qs) {
        std::vector<std::size_t> table(std::size_t{1} << qs.size());
        for (std::size_t v = 0; v < table.size(); ++v) {
            std::size_t idx = 0;
            for (std::size_t k = 0; k < qs.size(); ++k) {
                if ((v >> (qs.size() - 1 - k)) & 1U) {
                    idx |= bit_of(n, qs[k]);
                }
            }
            table[v] = idx;
        }
        return table;
    };
    const auto kidx = scatter(kept);
    const auto tidx = scatter(traced);
    const std::size_t d = kidx.size();
    ComplexMatrix out(d, d);
    for (const std::size_t e : tidx) {
        for (std::size_t r = 0; r < d; ++r) {
            const Complex ar = amplitudes[kidx[r] | e];
            if (ar == Complex{}) {
                continue;
            }
            for (std::size_t c = 0; c < d; ++c) {
                out(r, c) += ar * std::conj(amplitudes[kidx[c] | e]);
            }
        }
    }
    return out;
}

ComplexMatrix trace_out_qubit(const ComplexMatrix &rho, std::size_t n, std::size_t q) {
    check_qubit(n, q);
    if (n == 1) {
        throw std::invalid_argument("trace_out_qubit: cannot trace out the last qubit");
    }
    const std::size_t out_dim = rho.rows() / 2;
    const std::size_t low_bits = n - 1 - q; // bits below q
    const std::size_t low_mask = (std::size_t{1} << low_bits) - 1;
    auto expand = [&](std::size_t v, std::size_t b) {
        return ((v & ~low_mask) << 1) | (b << low_bits) | (v & low_mask);
    };
    ComplexMatrix out(out_dim, out_dim);
    for (std::size_t r = 0; r < out_dim; ++r) {
        for (std::size_t c = 0; c < out_dim; ++c) {
            out(r, c) = rho(expand(r, 0), expand(c, 0)) + rho(expand(r, 1), expand(c, 1));
        }
    }
    return out;
}

} // namespace kernels

StateVector::StateVector(std::size_t n_qubits)
    : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits) {
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (amps_.size() != (std::size_t{1} << n_qubits_)) {
        throw std::invalid_argument("StateVector: expected " +
                                    std::to_string(std::size_t{1} << n_qubits_) +
                                    " amplitudes, got " + std::to_string(amps_.size()));
    }
    if (std::abs(norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("StateVector: amplitudes are not normalized");
    }
}

StateVector StateVector::basis(std::size_t n_qubits, std::size_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) {
        throw std::invalid_argument("StateVector::basis: index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto &a : amps_) {
        sum += std::norm(a);
    }
    return std::sqrt(sum);
}

ComplexMatrix StateVector::marginal(std::size_t q) const {
    const std::size_t keep[] = {q};
    return kernels::reduced_from_pure(amps_, n_qubits_, keep);
}

DensityMatrix::DensityMatrix(const StateVector &pure)
    : n_qubits_(pure.n_qubits()), rho_(pure.projector()) {}

DensityMatrix::DensityMatrix(std::size_t n_qubits, ComplexMatrix matrix)
    : n_qubits_(n_qubits), rho_(std::move(matrix)) {
    const std::size_t dim = std::size_t{1} << n_qubits_;
    if (rho_.rows() != dim || rho_.cols() != dim) {
        throw std::invalid_argument("DensityMatrix: matrix dimension does not match qubit count");
    }
    if (!rho_.is_hermitian(kHermitianTol)) {
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    }
    if (std::abs(rho_.trace() - Complex(1.0)) > 1e-9) {
        throw std::invalid_argument("DensityMatrix: trace is not 1");
    }
}

ComplexMatrix DensityMatrix::marginal(std::size_t q) const {
    const std::size_t keep[] = {q};
    return partial_trace(rho_, n_qubits_, keep);
}

} // namespace qcnn
