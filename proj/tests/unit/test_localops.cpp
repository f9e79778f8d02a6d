#include "doctest.h"

#include <cmath>
#include <random>

#include "hjbi/localops.hpp"
#include "hjbi/model.hpp"
#include "oracle.hpp"

using namespace hjbi;

TEST_CASE("optimal distortion of the drift") {
    const ProblemSpec s = make_paper_spec(false);
    auto zero = optimal_lambda(s, 0.3, 0.0);
    CHECK(zero.lambda_star == 0.0);
    CHECK(zero.min_value == 0.0);
    for (double x : {0.0, 1.0}) {
        const auto b = optimal_lambda(s, x, 13.0);
        CHECK(b.lambda_star == 0.0);
        CHECK(b.min_value == 0.0);
    }
    const auto mid = optimal_lambda(s, 0.5, 2.0);
    CHECK(mid.lambda_star == doctest::Approx(0.25));
    CHECK(mid.min_value == doctest::Approx(-0.0625));
}

TEST_CASE("distortion of the drift is clamped") {
    const auto big = optimal_lambda(1.0, 0.5, 100.0, 0.25, 1e4);
    CHECK(big.lambda_star == 100.0);
    CHECK(big.min_value == doctest::Approx(-100.0 * 0.25 * 1e4 + 1e4));
    const auto neg = optimal_lambda(1.0, 0.5, 100.0, 0.25, -1e4);
    CHECK(neg.lambda_star == -100.0);
}

TEST_CASE("drift distortion matches a grid search") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ua(0.0, 0.25);
    std::uniform_real_distribution<double> up(-2000.0, 2000.0);
    for (int k = 0; k < 25; ++k) {
        const double a = ua(rng);
        const double p = up(rng);
        const auto out = optimal_lambda(1.0, 0.5, 100.0, a, p);
        CHECK(std::abs(out.min_value - oracle::lambda_minimum(1.0, 0.5, 100.0, a, p)) <= 1e-8);
    }
}

TEST_CASE("intervention choice") {
    ProblemSpec plain = make_paper_spec(false);
    const auto idle = optimal_q(plain, 0.5, 0.0);
    CHECK(idle.q_star == 0.0);
    CHECK(idle.max_value == 0.0);

    const ProblemSpec s = make_paper_spec(true);
    const auto up = optimal_q(s, 0.5, 2.0);
    CHECK(up.q_star == 1.0);
    CHECK(up.max_value == doctest::Approx(-0.1));
    const auto down = optimal_q(s, 0.5, -2.0);
    CHECK(down.q_star == 0.0);
    CHECK(down.max_value == doctest::Approx(0.5));
}

TEST_CASE("intervention ties go to the smallest q") {
    ProblemSpec s = make_paper_spec(true);
    s.cost_h = Coefficient::constant(0.0);
    s.q_grid_size = 5;
    // r(q) a p = (1 - q) * 0 at p = 0: every q ties.
    CHECK(optimal_q(s, 0.5, 0.0).q_star == 0.0);
    CHECK(QGrid(s).size() == 5);
}

TEST_CASE("hamiltonian values") {
    CHECK(hamiltonian(make_paper_spec(false), 0.5, 0.0) == 0.0);
    CHECK(hamiltonian(make_paper_spec(true), 0.5, 2.0) == doctest::Approx(0.1625));
    for (double x : {0.0, 1.0}) {
        CHECK(hamiltonian(make_paper_spec(true), x, 7.0) == doctest::Approx(make_paper_spec(true).disutility_f(x)));
    }
}

TEST_CASE("hamiltonian is Lipschitz in p") {
    const ProblemSpec s = make_paper_spec(true);
    const QGrid qs(s);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_real_distribution<double> up(-5000.0, 5000.0);
    for (int k = 0; k < 2000; ++k) {
        const double x = ux(rng);
        const double p1 = up(rng);
        const double p2 = up(rng);
        const double bound = (qs.r_max() + s.sigma * s.lambda_max) * s.growth_a(x) * std::abs(p1 - p2) + 1e-9;
        CHECK(std::abs(hamiltonian(s, x, p1) - hamiltonian(s, x, p2)) <= bound);
    }
}

TEST_CASE("intervention choice is invariant under positive scaling") {
    ProblemSpec s = make_paper_spec(true);
    s.q_grid_size = 11;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ux(0.05, 0.95);
    std::uniform_real_distribution<double> up(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
        const double x = ux(rng);
        const double p = up(rng);
        const double base = optimal_q(s, x, p).q_star;
        for (double c : {0.5, 3.0, 40.0}) {
            ProblemSpec scaled = s;
            scaled.cost_h = Coefficient::affine(0.0, 0.1 * c);
            CHECK(optimal_q(scaled, x, c * p).q_star == base);
        }
    }
}
