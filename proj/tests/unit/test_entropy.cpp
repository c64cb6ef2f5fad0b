#include "qcnn/entropy.hpp"
#include "qcnn/util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace qcnn;

TEST_CASE("von Neumann entropy of simple states") {
    CHECK(von_neumann_entropy(ComplexMatrix{{0.75, 0.0}, {0.0, 0.25}}) ==
          doctest::Approx(0.811278).epsilon(1e-6));
    CHECK(von_neumann_entropy(ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}) == 0.0);
    CHECK(von_neumann_entropy(ComplexMatrix{{0.5, 0.0}, {0.0, 0.5}}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(von_neumann_entropy(ComplexMatrix{{0.5, 0.0}, {0.0, 0.6}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(von_neumann_entropy(ComplexMatrix::identity(4)), std::invalid_argument);
}

TEST_CASE("conv unit 2 entropy is pinned at one bit") {
    const auto s = conv_unit_entropy_sample(2, 500, 0);
    for (const double v : s.values) {
        CHECK(std::abs(v - 1.0) < 1e-6);
    }
    const auto h = s.histogram(50);
    CHECK(h.counts.back() == 500);
    CHECK(h.edges.size() == 51);
}

TEST_CASE("conv unit samples are seeded and worker independent") {
    const auto a = conv_unit_entropy_sample(7, 200, 5, 1);
    const auto b = conv_unit_entropy_sample(7, 200, 5, 3);
    CHECK(a.values == b.values);
    CHECK(a.mean == b.mean);
    const auto c = conv_unit_entropy_sample(7, 200, 6, 1);
    CHECK(a.values != c.values);
    for (const double v : a.values) {
        CHECK(v >= -1e-9);
        CHECK(v <= 1.0 + 1e-9);
    }
}

TEST_CASE("zero conv parameters give zero entropy at every layer") {
    const Circuit c = build_qcnn(parse_ansatz("a1-nopool"));
    const std::vector<double> zeros(c.n_params(), 0.0);
    const auto layers = qcnn_layer_entropies(c, zeros);
    REQUIRE(layers.size() == 3);
    for (const double v : layers) {
        CHECK(v == doctest::Approx(0.0));
    }
}

TEST_CASE("layer-wise sampling ids") {
    const auto layers = qcnn_layerwise_entropy_sample(parse_ansatz("a8-nopool"), 20, 1);
    REQUIRE(layers.size() == 3);
    CHECK(layers[0].id == "a8-nopool/layer1");
    CHECK(layers[2].values.size() == 20);
}

TEST_CASE("histogram export") {
    const auto s = make_entropy_sample("t", {0.0, 0.5, 1.0, 1.0});
    CHECK(s.mean == doctest::Approx(0.625));
    CHECK_THROWS_AS((void)s.histogram(1), std::invalid_argument);
    const auto dir = std::filesystem::temp_directory_path() / "qcnn_hist_test";
    std::filesystem::create_directories(dir);
    export_histogram(s, 2, dir / "h.csv");
    CHECK(read_file(dir / "h.csv") == "bin_lo,bin_hi,count\n0,0.5,1\n0.5,1,3\n");
    std::filesystem::remove_all(dir);
}
