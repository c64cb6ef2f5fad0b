#include "oracles.hpp"
#include "qcnn/num_core.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcnn;

TEST_CASE("kron of sigma_x and |0><0|") {
    const ComplexMatrix p0{{1.0, 0.0}, {0.0, 0.0}};
    const ComplexMatrix k = kron(mat::pauli_x(), p0);
    REQUIRE(k.rows() == 4);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const double expected = ((r == 2 && c == 0) || (r == 0 && c == 2)) ? 1.0 : 0.0;
            CHECK(std::abs(k(r, c) - expected) == 0.0);
        }
    }
}

TEST_CASE("kron matches the dense oracle on random matrices") {
    const auto a = oracle::ry(0.3) * Complex(0.0, 1.0);
    const auto b = oracle::embed_1q(oracle::rx(1.1), 2, 1);
    CHECK(kron(a, b).max_abs_diff(oracle::dense_kron(a, b)) < 1e-15);
}

TEST_CASE("matrix product and adjoint") {
    const auto a = oracle::u3_by_product(0.4, 1.2, -0.7);
    CHECK((a * a.adjoint()).max_abs_diff(ComplexMatrix::identity(2)) < 1e-14);
    CHECK((a * a).max_abs_diff(oracle::matmul(a, a)) < 1e-15);
    CHECK_THROWS_AS((void)(ComplexMatrix(2, 3) * ComplexMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("partial trace agrees with index contraction") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto psi = oracle::random_state(3, seed);
        const auto rho = mat::projector(psi);
        for (const std::vector<std::size_t> keep :
             {std::vector<std::size_t>{0}, {1}, {2}, {0, 2}, {2, 1}, {0, 1, 2}}) {
            const auto got = partial_trace(rho, 3, keep);
            CHECK(got.max_abs_diff(oracle::partial_trace(rho, 3, keep)) < 1e-14);
        }
    }
}

TEST_CASE("partial trace of a random 2-qubit state has unit trace") {
    const auto rho = mat::projector(oracle::random_state(2, 42));
    const std::size_t keep[] = {1};
    CHECK(std::abs(partial_trace(rho, 2, keep).trace() - 1.0) < 1e-10);
}

TEST_CASE("partial trace rejects bad qubit lists") {
    const auto rho = mat::projector(oracle::random_state(2, 1));
    const std::size_t bad[] = {2};
    CHECK_THROWS_AS(partial_trace(rho, 2, bad), std::invalid_argument);
}

TEST_CASE("Hermitian spectra") {
    const ComplexMatrix m{{0.75, 0.0}, {0.0, 0.25}};
    const auto s = eig_hermitian_2x2(m);
    CHECK(s.eigenvalues[0] == doctest::Approx(0.75));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.25));

    const auto rho = mat::projector(oracle::random_state(2, 3));
    const auto full = eig_hermitian(rho);
    REQUIRE(full.eigenvalues.size() == 4);
    CHECK(full.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < 4; ++i) {
        CHECK(std::abs(full.eigenvalues[i]) < 1e-12);
    }
}

TEST_CASE("trace distance") {
    const ComplexMatrix zero{{1.0, 0.0}, {0.0, 0.0}};
    const ComplexMatrix mixed{{0.5, 0.0}, {0.0, 0.5}};
    CHECK(trace_distance(zero, mixed) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(trace_distance(zero, zero) == doctest::Approx(0.0));
    const ComplexMatrix one{{0.0, 0.0}, {0.0, 1.0}};
    CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
}
