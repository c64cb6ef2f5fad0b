#include "oracles.hpp"
#include "qcnn/ansatz.hpp"
#include "qcnn/circuit.hpp"
#include "qcnn/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qcnn;

namespace {

ComplexMatrix gate1(GateKind kind, std::initializer_list<double> angles) {
    const std::vector<double> a(angles);
    return gate_matrix_from_angles(kind, a);
}

} // namespace

TEST_CASE("rotation matrices") {
    CHECK(gate1(GateKind::Ry, {0.0}).max_abs_diff(ComplexMatrix::identity(2)) < 1e-15);
    const ComplexMatrix ry_pi{{0.0, -1.0}, {1.0, 0.0}};
    CHECK(gate1(GateKind::Ry, {std::numbers::pi}).max_abs_diff(ry_pi) < 1e-15);
    for (double t : {-2.3, 0.4, 1.7, 5.9}) {
        CHECK(gate1(GateKind::Rx, {t}).max_abs_diff(oracle::rx(t)) < 1e-15);
        CHECK(gate1(GateKind::Ry, {t}).max_abs_diff(oracle::ry(t)) < 1e-15);
        CHECK(gate1(GateKind::Rz, {t}).max_abs_diff(oracle::rz(t)) < 1e-15);
    }
}

TEST_CASE("U3 equals the five-rotation product") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-2 * std::numbers::pi, 2 * std::numbers::pi);
    for (int i = 0; i < 50; ++i) {
        const double t = angle(rng), p = angle(rng), l = angle(rng);
        CHECK(gate1(GateKind::U3, {t, p, l}).max_abs_diff(oracle::u3_by_product(t, p, l)) < 1e-14);
    }
}

TEST_CASE("gate arity is enforced") {
    CHECK_THROWS_AS(gate1(GateKind::U3, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(gate1(GateKind::H, {0.1}), std::invalid_argument);
    CircuitBuilder b(2, 1);
    CHECK_THROWS_AS(b.cnot(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(b.rx(2, FixedAngle{0.1}), std::invalid_argument);
    CHECK_THROWS_AS(b.rx(0, ParamSlot{3}), std::invalid_argument);
}

TEST_CASE("builder rejects unreferenced slots and gates on discarded qubits") {
    CircuitBuilder unused(2, 2);
    unused.rx(0, ParamSlot{0});
    CHECK_THROWS_AS((void)unused.build(), std::invalid_argument);

    CircuitBuilder b(2, 0);
    b.discard(0);
    CHECK_THROWS_AS(b.h(0), std::invalid_argument);
    CHECK_NOTHROW(b.h(1));
}

TEST_CASE("random 3-gate circuits match the dense unitary") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    const std::size_t n = 3;
    const GateKind kinds[] = {GateKind::H,  GateKind::X,    GateKind::Rx,  GateKind::Ry,
                              GateKind::Rz, GateKind::U3,   GateKind::CNOT, GateKind::CZ,
                              GateKind::CRx, GateKind::CRz};
    for (int trial = 0; trial < 200; ++trial) {
        CircuitBuilder b(n, 0);
        ComplexMatrix u = ComplexMatrix::identity(8);
        for (int g = 0; g < 3; ++g) {
            const GateKind kind = kinds[rng() % std::size(kinds)];
            const std::size_t q0 = rng() % n;
            const std::size_t q1 = (q0 + 1 + rng() % (n - 1)) % n;
            const double a = angle(rng), p = angle(rng), l = angle(rng);
            ComplexMatrix step;
            switch (kind) {
            case GateKind::H:
                b.h(q0);
                step = oracle::embed_1q(mat::hadamard(), n, q0);
                break;
            case GateKind::X:
                b.x(q0);
                step = oracle::embed_1q(mat::pauli_x(), n, q0);
                break;
            case GateKind::Rx:
                b.rx(q0, FixedAngle{a});
                step = oracle::embed_1q(oracle::rx(a), n, q0);
                break;
            case GateKind::Ry:
                b.ry(q0, FixedAngle{a});
                step = oracle::embed_1q(oracle::ry(a), n, q0);
                break;
            case GateKind::Rz:
                b.rz(q0, FixedAngle{a});
                step = oracle::embed_1q(oracle::rz(a), n, q0);
                break;
            case GateKind::U3:
                b.u3(q0, FixedAngle{a}, FixedAngle{p}, FixedAngle{l});
                step = oracle::embed_1q(oracle::u3_by_product(a, p, l), n, q0);
                break;
            case GateKind::CNOT:
                b.cnot(q0, q1);
                step = oracle::embed_controlled(mat::pauli_x(), n, q0, q1);
                break;
            case GateKind::CZ:
                b.cz(q0, q1);
                step = oracle::embed_controlled(mat::pauli_z(), n, q0, q1);
                break;
            case GateKind::CRx:
                b.crx(q0, q1, FixedAngle{a});
                step = oracle::embed_controlled(oracle::rx(a), n, q0, q1);
                break;
            case GateKind::CRz:
                b.crz(q0, q1, FixedAngle{a});
                step = oracle::embed_controlled(oracle::rz(a), n, q0, q1);
                break;
            }
            u = oracle::matmul(step, u);
        }
        const Circuit c = b.build();
        const auto psi = oracle::random_state(n, 100 + static_cast<std::uint64_t>(trial));
        const StateVector out = run_statevector(c, {}, StateVector(n, psi));
        const auto expected = oracle::apply(u, psi);
        double err = 0.0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            err = std::max(err, std::abs(out[i] - expected[i]));
        }
        CHECK(err < 1e-12);
        CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("density backend matches statevector projector for a random 8-qubit ansatz") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    for (const auto &spec : {parse_ansatz("a9-pool"), parse_ansatz("a7-nopool")}) {
        const Circuit c = build_qcnn(spec);
        std::vector<double> params(c.n_params());
        for (auto &p : params) {
            p = angle(rng);
        }
        const StateVector in(8, oracle::random_state(8, 9));
        const auto pure = run_statevector(c, params, in);
        const auto mixed = run_density(c, params, DensityMatrix(in));
        CHECK(trace_distance(mixed.matrix(), pure.projector()) < 1e-10);
    }
}

TEST_CASE("parameter count mismatch is rejected") {
    const Circuit c = build_qcnn(parse_ansatz("a3-nopool"));
    const std::vector<double> params(c.n_params() + 1, 0.0);
    CHECK_THROWS_AS(run_statevector(c, params, StateVector(8)), std::invalid_argument);
}

TEST_CASE("active qubits and readout") {
    const Circuit c = build_qcnn(parse_ansatz("a1-pool"));
    CHECK(c.layer_count() == 3);
    CHECK(c.readout_qubit() == 4);
    CHECK(c.active_qubits(0).size() == 8);
    CHECK(c.active_qubits(c.layer_end_position(1)).size() == 4);
    CHECK(c.active_qubits(c.layer_end_position(2)).size() == 2);
    CHECK_THROWS_AS((void)c.layer_end_position(4), std::invalid_argument);
}
