#include "doctest.h"

#include <algorithm>
#include <string>

#include "hjbi/model.hpp"
#include "oracle.hpp"

using namespace hjbi;

namespace {

bool mentions(const ValidationResult& r, const std::string& needle) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("uncontrolled preset") {
    const ProblemSpec s = make_paper_spec(false);
    CHECK(s.psi0 == 0.5);
    CHECK(s.horizon == 50.0);
    CHECK(s.disutility_f(0.5) == 0.0);
    CHECK(s.disutility_f(0.0) == 1.0);
    CHECK(s.disutility_f(1.0) == 1.0);
    CHECK(s.sigma == 1.0);
    CHECK(s.nu1 == 1.0);
    CHECK(s.nu2 == 1.0);
    CHECK(s.theta_max == 100.0);
    CHECK(s.lambda_max == 100.0);
    CHECK(s.cost_h(0.0) == 0.0);
}

TEST_CASE("controlled preset") {
    const ProblemSpec s = make_paper_spec(true);
    CHECK(s.growth_rate_r(1.0) == doctest::Approx(0.0));
    CHECK(s.growth_rate_r(0.0) == doctest::Approx(1.0));
    CHECK(s.cost_h(1.0) == doctest::Approx(0.1));
    CHECK(s.cost_h(0.0) == 0.0);
    CHECK(s.q_max == 1.0);
    CHECK(s.q_point(0) == 0.0);
    CHECK(s.q_point(s.q_grid_size - 1) == 1.0);
}

TEST_CASE("logistic growth at the boundary and centre") {
    for (bool b : {false, true}) {
        const ProblemSpec s = make_paper_spec(b);
        CHECK(s.growth_a(0.0) == 0.0);
        CHECK(s.growth_a(1.0) == 0.0);
        CHECK(s.growth_a(0.5) == 0.25);
    }
}

TEST_CASE("presets validate") {
    CHECK(validate_spec(make_paper_spec(false)).ok());
    CHECK(validate_spec(make_paper_spec(true)).ok());
}

TEST_CASE("growth that does not vanish at x = 1 is rejected") {
    ProblemSpec s = make_paper_spec(false);
    s.growth_a = Coefficient::affine(0.0, 1.0);
    const auto r = validate_spec(s);
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "a(1)"));
}

TEST_CASE("negative psi0 is rejected") {
    ProblemSpec s = make_paper_spec(false);
    s.psi0 = -0.5;
    const auto r = validate_spec(s);
    CHECK_FALSE(r.ok());
    CHECK(mentions(r, "psi0 must be > 0"));
}

TEST_CASE("all violations are collected") {
    ProblemSpec s = make_paper_spec(true);
    s.psi0 = -1.0;
    s.psi1 = 0.0;
    s.cost_h = Coefficient::affine(-1.0, 0.0);
    s.disutility_f = Coefficient::constant(-0.5);
    const auto r = validate_spec(s);
    CHECK(r.violations.size() >= 4);
}

TEST_CASE("uniform densities are normalized") {
    for (auto [lo, hi] : {std::pair{0.1, 0.9}, std::pair{0.2, 0.4}, std::pair{0.01, 0.99}, std::pair{0.3, 0.31}}) {
        const auto d = JumpDensity::uniform(lo, hi);
        CHECK(std::abs(d.total_mass() - 1.0) <= 1e-12);
        const double mass = oracle::simpson([&](double z) { return d(z); }, lo, hi);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("invalid densities throw") {
    CHECK_THROWS_AS(JumpDensity::uniform(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(JumpDensity::uniform(0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(JumpDensity::uniform(0.6, 0.5), std::invalid_argument);
}

TEST_CASE("tabulated density quantile inverts its CDF") {
    const auto d = JumpDensity::table({{0.2, 0.0}, {0.5, 2.0}, {0.7, 3.0}, {0.8, 0.5}});
    const double mass = oracle::simpson([&](double z) { return d(z); }, 0.2, 0.8, 6000);
    CHECK(d.total_mass() == doctest::Approx(mass).epsilon(1e-8));
    for (double u : {0.0, 0.05, 0.3, 0.5, 0.77, 0.99, 1.0}) {
        const double z = d.quantile(u);
        CHECK(z >= 0.2);
        CHECK(z <= 0.8);
        const double cdf = z > 0.2 ? oracle::simpson([&](double w) { return d(w); }, 0.2, z, 6000) / mass : 0.0;
        CHECK(cdf == doctest::Approx(u).epsilon(1e-7));
    }
}

TEST_CASE("tabulated coefficient interpolates and holds at the ends") {
    const auto c = Coefficient::table({{0.0, 1.0}, {0.5, 0.0}, {1.0, 2.0}});
    CHECK(c(0.25) == doctest::Approx(0.5));
    CHECK(c(0.75) == doctest::Approx(1.0));
    CHECK(c(-1.0) == 1.0);
    CHECK(c(2.0) == 2.0);
}

TEST_CASE("coefficients by name") {
    CHECK(Coefficient::from_name("tent", {}, {})(0.25) == doctest::Approx(0.5));
    CHECK(Coefficient::from_name("logistic", {2.0}, {})(0.5) == doctest::Approx(0.5));
    CHECK(Coefficient::from_name("affine", {1.0, -1.0}, {})(0.25) == doctest::Approx(0.75));
    CHECK(Coefficient::from_name("constant", {3.0}, {})(0.9) == 3.0);
    CHECK_THROWS(Coefficient::from_name("cubic", {}, {}));
}
