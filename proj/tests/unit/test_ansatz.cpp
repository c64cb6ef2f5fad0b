#include "oracles.hpp"
#include "qcnn/ansatz.hpp"
#include "qcnn/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qcnn;

TEST_CASE("parameter counts at 8 qubits") {
    const std::size_t pooled[] = {12, 12, 18, 24, 24, 24, 36, 36, 51};
    const std::size_t bare[] = {6, 6, 12, 18, 18, 18, 30, 30, 45};
    for (int id = 1; id <= 9; ++id) {
        CHECK(param_count({id, true, 8}) == pooled[id - 1]);
        CHECK(param_count({id, false, 8}) == bare[id - 1]);
        CHECK(build_qcnn({id, true, 8}).n_params() == pooled[id - 1]);
        CHECK(build_qcnn({id, false, 8}).n_params() == bare[id - 1]);
    }
}

TEST_CASE("larger registers use four layers") {
    for (const std::size_t n : {10, 12}) {
        const Circuit c = build_qcnn({3, false, n});
        CHECK(c.layer_count() == 4);
        CHECK(c.readout_qubit() == 8);
        CHECK(param_count({3, false, n}) == 16);
        CHECK(param_count({3, true, n}) == 24);
    }
}

TEST_CASE("ansatz names") {
    CHECK(parse_ansatz("a3-nopool").conv_id == 3);
    CHECK_FALSE(parse_ansatz("a3-nopool").pooling);
    CHECK(parse_ansatz("a9-pool").pooling);
    CHECK(parse_ansatz("a5-pool").name() == "a5-pool");
    for (const char *bad : {"a0-pool", "a10-pool", "a3", "b3-pool", "a3-nopools", ""}) {
        CHECK_THROWS_AS(parse_ansatz(bad), std::invalid_argument);
    }
    CHECK_THROWS_AS(parse_ansatz("a3-pool", 9), std::invalid_argument);
    CHECK(all_ansatzes().size() == 18);
}

TEST_CASE("conv unit parameter counts") {
    for (int id = 1; id <= 9; ++id) {
        CHECK(build_conv_unit(id).n_params() == kConvUnitParams[id - 1]);
    }
    CHECK(build_pooling_unit().n_params() == kPoolingUnitParams);
}

TEST_CASE("zero rotations leave |0...0> with p1 = 0") {
    const Circuit c = build_qcnn(parse_ansatz("a1-nopool"));
    const std::vector<double> zeros(c.n_params(), 0.0);
    CHECK(readout_probability(c, zeros, StateVector(8)) == doctest::Approx(0.0));
}

TEST_CASE("pooling output has unit trace") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    const Circuit pool = build_pooling_unit();
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> params = {angle(rng), angle(rng)};
        const StateVector in(2, oracle::random_state(2, static_cast<std::uint64_t>(i)));
        const auto rho = run_density(pool, params, DensityMatrix(in));
        CHECK(std::abs(rho.marginal(1).trace() - 1.0) < 1e-10);
    }
}

TEST_CASE("layer schedule halves the register") {
    const auto plan = layer_schedule(8);
    REQUIRE(plan.size() == 3);
    CHECK(plan[0].survivors.size() == 4);
    CHECK(plan[1].survivors.size() == 2);
    REQUIRE(plan[2].survivors.size() == 1);
    CHECK(plan[2].survivors[0] == 4);
}
