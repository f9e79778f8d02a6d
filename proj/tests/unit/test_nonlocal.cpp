#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "hjbi/grid.hpp"
#include "hjbi/model.hpp"
#include "hjbi/nonlocal.hpp"
#include "oracle.hpp"

using namespace hjbi;

namespace {

std::vector<double> sample(const Mesh& m, double (*g)(double)) {
    std::vector<double> v(static_cast<std::size_t>(m.size()));
    for (int i = 0; i < m.size(); ++i) v[static_cast<std::size_t>(i)] = g(m.node(i));
    return v;
}

double identity(double x) { return x; }

}  // namespace

TEST_CASE("fixed points of the jump maps") {
    const Mesh m = build_mesh(50);
    const auto d = JumpDensity::uniform(0.1, 0.9);
    const auto down = build_jump_quadrature(m, d, JumpTransform::Down);
    const auto up = build_jump_quadrature(m, d, JumpTransform::Up);
    REQUIRE(down.row_cols(0).size() >= 1);
    double off = 0.0;
    for (std::size_t k = 0; k < down.row_cols(0).size(); ++k) {
        if (down.row_cols(0)[k] != 0) off += down.row_weights(0)[k];
    }
    CHECK(off == 0.0);
    off = 0.0;
    for (std::size_t k = 0; k < up.row_cols(50).size(); ++k) {
        if (up.row_cols(50)[k] != 50) off += up.row_weights(50)[k];
    }
    CHECK(off == 0.0);
}

TEST_CASE("jump expectations of the identity") {
    const Mesh m = build_mesh(100);
    const auto d = JumpDensity::uniform(0.2, 0.4);
    const auto phi = sample(m, identity);
    const auto down = apply_expectation(build_jump_quadrature(m, d, JumpTransform::Down, 64), phi);
    const auto up = apply_expectation(build_jump_quadrature(m, d, JumpTransform::Up, 64), phi);
    // (1/0.2) int_0.2^0.4 (1 - z) dz and (1/0.2) int_0.2^0.4 z dz
    const double analytic_down = oracle::simpson([](double z) { return (1.0 - z) / 0.2; }, 0.2, 0.4);
    const double analytic_up = oracle::simpson([](double z) { return z / 0.2; }, 0.2, 0.4);
    CHECK(analytic_down == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::abs(down[100] - analytic_down) <= 2e-3);
    CHECK(std::abs(up[0] - analytic_up) <= 2e-3);
    CHECK(down[0] == 0.0);
}

TEST_CASE("constants are preserved exactly") {
    const Mesh m = build_mesh(64);
    for (JumpTransform t : {JumpTransform::Down, JumpTransform::Up}) {
        const auto q = build_jump_quadrature(m, JumpDensity::table({{0.1, 1.0}, {0.4, 3.0}, {0.7, 0.0}}), t, 33);
        const auto out = apply_expectation(q, std::vector<double>(65, 2.5));
        for (double v : out) CHECK(std::abs(v - 2.5) <= 1e-14);
    }
}

TEST_CASE("quadrature rows are stochastic") {
    for (int n : {2, 10, 200}) {
        const Mesh m = build_mesh(n);
        for (JumpTransform t : {JumpTransform::Down, JumpTransform::Up}) {
            const auto q = build_jump_quadrature(m, JumpDensity::uniform(0.1, 0.9), t);
            for (int i = 0; i < m.size(); ++i) {
                double s = 0.0;
                for (double w : q.row_weights(i)) {
                    CHECK(w >= 0.0);
                    s += w;
                }
                CHECK(std::abs(s - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("point-mass jump sizes map to a single post-jump point") {
    const Mesh m = build_mesh(10);
    const auto q = build_jump_quadrature(m, JumpDensity::uniform(0.3, 0.3), JumpTransform::Down);
    const auto phi = sample(m, identity);
    const auto out = apply_expectation(q, phi);
    for (int i = 0; i < m.size(); ++i) CHECK(out[static_cast<std::size_t>(i)] == doctest::Approx(0.7 * m.node(i)));
}

TEST_CASE("quadrature argument errors") {
    const Mesh m = build_mesh(10);
    CHECK_THROWS_AS(build_jump_quadrature(m, JumpDensity::uniform(0.1, 0.9), JumpTransform::Down, 1),
                    std::invalid_argument);
    const auto q = build_jump_quadrature(m, JumpDensity::uniform(0.1, 0.9), JumpTransform::Down);
    CHECK_THROWS_AS(apply_expectation(q, std::vector<double>(5, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(apply_nonlocal(q, std::vector<double>(11, 0.0), 1.0, 0.0, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_nonlocal(q, std::vector<double>(11, 0.0), 1.0, -1.0, 100.0), std::invalid_argument);
}

TEST_CASE("closed-form jump terms") {
    const Mesh m = build_mesh(100);
    const auto q = build_jump_quadrature(m, JumpDensity::uniform(0.2, 0.4), JumpTransform::Down);

    const auto flat = apply_nonlocal(q, std::vector<double>(101, 4.0), 1.0, 0.5, 100.0);
    for (std::size_t i = 0; i < 101; ++i) {
        CHECK(std::abs(flat.delta[i]) <= 1e-14);
        CHECK(std::abs(flat.values[i]) <= 1e-14);
        CHECK(flat.theta_star[i] == doctest::Approx(1.0));
    }

    const auto lin = apply_nonlocal(q, sample(m, identity), 1.0, 0.5, 100.0);
    CHECK(std::abs(lin.delta[100] - 0.3) <= 2e-3);
    CHECK(std::abs(lin.values[100] - 2.0 * (1.0 - std::exp(-0.15))) <= 2e-3);
    CHECK(std::abs(lin.values[100] - 0.278584) <= 2e-3);
    CHECK(std::abs(lin.theta_star[100] - 0.860708) <= 2e-3);
}

TEST_CASE("worst-case distortion at a prescribed gap") {
    // Two-node mesh, point mass z = 0.5: down row at x = 1 lands on x = 0.5.
    const Mesh m = build_mesh(2);
    const auto q = build_jump_quadrature(m, JumpDensity::uniform(0.5, 0.5), JumpTransform::Down);
    const double gap = 2.0 * std::log(2.0);
    const auto out = apply_nonlocal(q, std::vector<double>{0.0, 0.0, gap}, 1.0, 0.5, 100.0);
    CHECK(out.delta[2] == doctest::Approx(gap));
    CHECK(std::abs(out.theta_star[2] - 0.5) <= 1e-12);
}

TEST_CASE("jump terms ignore constant shifts") {
    const Mesh m = build_mesh(80);
    const auto q = build_jump_quadrature(m, JumpDensity::uniform(0.1, 0.9), JumpTransform::Up);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<double> phi(81);
    for (double& v : phi) v = u(rng);
    const auto base = apply_nonlocal(q, phi, 1.0, 0.5, 100.0);
    for (double c : {-2.0, 0.5, 10.0}) {
        std::vector<double> shifted = phi;
        for (double& v : shifted) v += c;
        const auto s = apply_nonlocal(q, shifted, 1.0, 0.5, 100.0);
        CHECK(oracle::max_abs_diff(base.delta, s.delta) <= 1e-12);
        CHECK(oracle::max_abs_diff(base.values, s.values) <= 1e-12);
        CHECK(oracle::max_abs_diff(base.theta_star, s.theta_star) <= 1e-11);
    }
}

TEST_CASE("jump terms stay below their asymptote and vanish at fixed points") {
    const Mesh m = build_mesh(40);
    const auto down = build_jump_quadrature(m, JumpDensity::uniform(0.1, 0.9), JumpTransform::Down);
    const auto up = build_jump_quadrature(m, JumpDensity::uniform(0.1, 0.9), JumpTransform::Up);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> phi(41);
        for (double& v : phi) v = u(rng);
        for (const auto* q : {&down, &up}) {
            const auto out = apply_nonlocal(*q, phi, 1.5, 0.7, 100.0);
            for (double v : out.values) CHECK(v < 1.5 / 0.7);
            for (double th : out.theta_star) {
                CHECK(th >= 0.0);
                CHECK(th <= 100.0);
            }
        }
        CHECK(apply_nonlocal(down, phi, 1.0, 0.5, 100.0).values[0] == 0.0);
        CHECK(apply_nonlocal(up, phi, 1.0, 0.5, 100.0).values[40] == 0.0);
    }
}

TEST_CASE("jump terms match direct minimization over theta") {
    const Mesh m = build_mesh(30);
    const auto q = build_jump_quadrature(m, JumpDensity::uniform(0.1, 0.9), JumpTransform::Down);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 12.0);
    std::vector<double> phi(31);
    for (double& v : phi) v = u(rng);
    const auto out = apply_nonlocal(q, phi, 1.0, 0.5, 100.0);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        CHECK(std::abs(out.values[i] - oracle::jump_penalty_minimum(1.0, 0.5, out.delta[i], 100.0)) <= 1e-6);
    }
}

TEST_CASE("entropy kernel") {
    CHECK(entropy_kernel(1.0) == 0.0);
    CHECK(entropy_kernel(0.0) == 1.0);
    CHECK(entropy_kernel(2.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0));
    for (double th : {0.01, 0.3, 0.99, 1.5, 50.0}) CHECK(entropy_kernel(th) > 0.0);
}
