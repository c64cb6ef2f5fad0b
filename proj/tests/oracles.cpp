#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace oracle {

namespace {
const Complex kI{0.0, 1.0};
}

ComplexMatrix rx(double t) {
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    return ComplexMatrix{{c, -kI * s}, {-kI * s, c}};
}

ComplexMatrix ry(double t) {
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    return ComplexMatrix{{c, -s}, {s, c}};
}

ComplexMatrix rz(double t) {
    return ComplexMatrix{{std::exp(-kI * (t / 2)), 0.0}, {0.0, std::exp(kI * (t / 2))}};
}

ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(k, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

ComplexMatrix dense_kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

ComplexMatrix u3_by_product(double theta, double phi, double lambda) {
    const double h = std::numbers::pi / 2;
    return matmul(matmul(matmul(matmul(rz(phi), rx(-h)), rz(theta)), rx(h)), rz(lambda));
}

ComplexMatrix embed_1q(const ComplexMatrix &u, std::size_t n, std::size_t q) {
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (std::size_t k = 0; k < n; ++k) {
        out = dense_kron(out, k == q ? u : ComplexMatrix::identity(2));
    }
    return out;
}

ComplexMatrix embed_controlled(const ComplexMatrix &u, std::size_t n, std::size_t control,
                               std::size_t target) {
    const ComplexMatrix p0{{1.0, 0.0}, {0.0, 0.0}};
    const ComplexMatrix p1{{0.0, 0.0}, {0.0, 1.0}};
    ComplexMatrix off = ComplexMatrix::identity(1);
    ComplexMatrix on = ComplexMatrix::identity(1);
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexMatrix id = ComplexMatrix::identity(2);
        off = dense_kron(off, k == control ? p0 : id);
        on = dense_kron(on, k == control ? p1 : (k == target ? u : id));
    }
    return off + on;
}

std::vector<Complex> apply(const ComplexMatrix &u, std::span<const Complex> psi) {
    std::vector<Complex> out(u.rows());
    for (std::size_t i = 0; i < u.rows(); ++i) {
        for (std::size_t j = 0; j < u.cols(); ++j) {
            out[i] += u(i, j) * psi[j];
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix &rho, std::size_t n,
                            std::vector<std::size_t> keep) {
    std::sort(keep.begin(), keep.end());
    std::vector<std::size_t> traced;
    for (std::size_t q = 0; q < n; ++q) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
            traced.push_back(q);
        }
    }
    auto compose = [&](std::size_t kept_bits, std::size_t traced_bits) {
        std::size_t index = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            const std::size_t b = (kept_bits >> (keep.size() - 1 - i)) & 1U;
            index |= b << (n - 1 - keep[i]);
        }
        for (std::size_t i = 0; i < traced.size(); ++i) {
            const std::size_t b = (traced_bits >> (traced.size() - 1 - i)) & 1U;
            index |= b << (n - 1 - traced[i]);
        }
        return index;
    };
    const std::size_t dk = std::size_t{1} << keep.size();
    const std::size_t dt = std::size_t{1} << traced.size();
    ComplexMatrix out(dk, dk);
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t b = 0; b < dk; ++b) {
            for (std::size_t t = 0; t < dt; ++t) {
                out(a, b) += rho(compose(a, t), compose(b, t));
            }
        }
    }
    return out;
}

std::vector<Complex> random_state(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Complex> psi(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &a : psi) {
        a = Complex(g(rng), g(rng));
        norm += std::norm(a);
    }
    for (auto &a : psi) {
        a /= std::sqrt(norm);
    }
    return psi;
}

bool perceptron_separates(const std::vector<std::vector<double>> &xs, const std::vector<int> &ys,
                          std::size_t max_epochs, double *margin) {
    const std::size_t d = xs.front().size();
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
        bool clean = true;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double s = ys[i] == 1 ? 1.0 : -1.0;
            double z = b;
            for (std::size_t k = 0; k < d; ++k) {
                z += w[k] * xs[i][k];
            }
            if (s * z <= 0.0) {
                clean = false;
                for (std::size_t k = 0; k < d; ++k) {
                    w[k] += s * xs[i][k];
                }
                b += s;
            }
        }
        if (clean) {
            if (margin != nullptr) {
                double wn = 0.0;
                for (double v : w) {
                    wn += v * v;
                }
                double m = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    double z = b;
                    for (std::size_t k = 0; k < d; ++k) {
                        z += w[k] * xs[i][k];
                    }
                    m = std::min(m, (ys[i] == 1 ? z : -z) / std::sqrt(wn));
                }
                *margin = m;
            }
            return true;
        }
    }
    return false;
}

} // namespace oracle
