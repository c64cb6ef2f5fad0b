#pragma once

// Reference implementations used only by tests. They are written directly
// from the definitions with dense matrices and share no code with the
// library's kernels.

#include "qcnn/num_core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace oracle {

using qcnn::Complex;
using qcnn::ComplexMatrix;

ComplexMatrix rx(double t);
ComplexMatrix ry(double t);
ComplexMatrix rz(double t);
ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b);
ComplexMatrix dense_kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// Rz(phi) Rx(-pi/2) Rz(theta) Rx(pi/2) Rz(lambda).
ComplexMatrix u3_by_product(double theta, double phi, double lambda);

/// Full 2^n unitary of a single-qubit operator on qubit q (qubit 0 is the MSB).
ComplexMatrix embed_1q(const ComplexMatrix &u, std::size_t n, std::size_t q);
/// Full 2^n unitary of `u` on `target` controlled on `control`.
ComplexMatrix embed_controlled(const ComplexMatrix &u, std::size_t n, std::size_t control,
                               std::size_t target);

std::vector<Complex> apply(const ComplexMatrix &u, std::span<const Complex> psi);

/// Partial trace by explicit index contraction; kept qubits in ascending order.
ComplexMatrix partial_trace(const ComplexMatrix &rho, std::size_t n,
                            std::vector<std::size_t> keep);

std::vector<Complex> random_state(std::size_t n, std::uint64_t seed);

/// Central difference of f at x along coordinate k.
template <class F>
double central_difference(F &&f, std::vector<double> x, std::size_t k, double h) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const double up = f(x);
    x[k] = x0 - h;
    const double down = f(x);
    return (up - down) / (2.0 * h);
}

/// Perceptron on labelled points; returns true once an epoch makes no mistake.
bool perceptron_separates(const std::vector<std::vector<double>> &xs, const std::vector<int> &ys,
                          std::size_t max_epochs, double *margin = nullptr);

} // namespace oracle
