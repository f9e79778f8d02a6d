#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "hjbi/grid.hpp"

using namespace hjbi;

TEST_CASE("mesh sizes") {
    const Mesh m = build_mesh(500);
    CHECK(m.size() == 501);
    CHECK(m.dx() == doctest::Approx(0.002));
    CHECK(m.node(0) == 0.0);
    CHECK(m.node(500) == 1.0);

    const Mesh two = build_mesh(2);
    REQUIRE(two.size() == 3);
    CHECK(two.node(0) == 0.0);
    CHECK(two.node(1) == 0.5);
    CHECK(two.node(2) == 1.0);

    CHECK_THROWS_AS(build_mesh(1), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(0), std::invalid_argument);
}

TEST_CASE("interpolation weights") {
    const Mesh m = build_mesh(10);
    const auto w = interp_weights(m, 0.37);
    CHECK(w.index == 3);
    CHECK(w.left == doctest::Approx(0.3));
    CHECK(w.right == doctest::Approx(0.7));

    const auto at0 = interp_weights(m, 0.0);
    CHECK(at0.index == 0);
    CHECK(at0.left == 1.0);
    CHECK(at0.right == 0.0);

    const auto at1 = interp_weights(m, 1.0);
    CHECK(at1.index == 9);
    CHECK(at1.left == 0.0);
    CHECK(at1.right == 1.0);

    const auto hit = interp_weights(m, 0.4);
    CHECK(hit.index == 4);
    CHECK(hit.left == 1.0);

    CHECK_THROWS_AS(interp_weights(m, -1e-9), std::invalid_argument);
    CHECK_THROWS_AS(interp_weights(m, 1.0 + 1e-9), std::invalid_argument);
}

TEST_CASE("weights reconstruct the probe point") {
    for (int n : {2, 7, 10, 500}) {
        const Mesh m = build_mesh(n);
        for (int k = 0; k <= 10000; ++k) {
            const double y = k / 10000.0;
            const auto w = interp_weights(m, y);
            CHECK(w.left >= 0.0);
            CHECK(w.right >= 0.0);
            CHECK(w.left <= 1.0);
            CHECK(w.right <= 1.0);
            CHECK(std::abs(w.left + w.right - 1.0) <= 1e-15);
            const double back = w.left * m.node(w.index) + w.right * m.node(w.index + 1);
            if (std::abs(back - y) > 1e-13) FAIL("reconstruction error at y = " << y);
        }
    }
}

TEST_CASE("affine functions interpolate exactly") {
    const Mesh m = build_mesh(37);
    std::vector<double> v(static_cast<std::size_t>(m.size()));
    for (int i = 0; i < m.size(); ++i) v[static_cast<std::size_t>(i)] = 3.0 - 2.5 * m.node(i);
    for (int k = 0; k <= 997; ++k) {
        const double y = k / 997.0;
        CHECK(std::abs(interpolate(m, v, y) - (3.0 - 2.5 * y)) <= 1e-12);
    }
}

TEST_CASE("time grid") {
    const TimeGrid g(0.005, 50.0);
    CHECK(g.n_steps() == 10000);
    CHECK(std::abs(g.n_steps() * g.dt() - 50.0) <= 1e-10 * 50.0);
    CHECK(g.time(g.n_steps()) == 50.0);
    CHECK(g.time(0) == 0.0);
    CHECK_THROWS_AS(TimeGrid(0.3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(0.0, 1.0), std::invalid_argument);
}
