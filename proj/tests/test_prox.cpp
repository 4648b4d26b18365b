#include <doctest.h>

#include <cmath>
#include <limits>

#include "nprr/prox.hpp"
#include "nprr/random.hpp"
#include "support.hpp"

using namespace nprr;

TEST_CASE("closed-form prox examples") {
    CHECK(Regularizer::l1(0.01).prox(Vector{0.5}, 1.0)[0] == doctest::Approx(0.49).epsilon(1e-15));
    CHECK(Regularizer::zero().prox(Vector{0.7}, 3.0)[0] == 0.7);

    const Vector nn = Regularizer::nonneg().prox(Vector{-3.0, 2.0}, 0.3);
    CHECK(nn == Vector{0.0, 2.0});

    const Vector s1 = Regularizer::simplex().prox(Vector{2.0, 0.0}, 1.0);
    CHECK(s1[0] == doctest::Approx(1.0));
    CHECK(s1[1] == doctest::Approx(0.0));
    const Vector s2 = Regularizer::simplex().prox(Vector{0.6, 0.6}, 1.0);
    CHECK(s2[0] == doctest::Approx(0.5));
    CHECK(s2[1] == doctest::Approx(0.5));

    const Vector bx = Regularizer::box(-1.0, 2.0).prox(Vector{-3.0, 0.5, 5.0}, 1.0);
    CHECK(bx == Vector{-1.0, 0.5, 2.0});

    // argmin |y| + 0.5 y^2 + (3 - y)^2 / 2: 1 + y - (3 - y) = 0
    CHECK(Regularizer::elastic_net(1.0, 0.5).prox(Vector{3.0}, 1.0)[0] == doctest::Approx(1.0));

    // MCP nu=1, gamma=2: dead zone below t*nu, then (|z| - t nu) / (1 - t/gamma), identity beyond gamma*nu
    const Regularizer mcp = Regularizer::mcp(1.0, 2.0);
    CHECK(mcp.rho() == 0.5);
    CHECK(mcp.prox(Vector{0.3}, 1.0)[0] == 0.0);
    CHECK(mcp.prox(Vector{1.5}, 1.0)[0] == doctest::Approx(1.0));
    CHECK(mcp.prox(Vector{-1.5}, 1.0)[0] == doctest::Approx(-1.0));
    CHECK(mcp.prox(Vector{2.5}, 1.0)[0] == 2.5);
}

TEST_CASE("prox output may alias its input") {
    Vector z = {0.9, -0.2, 3.0};
    const Regularizer reg = Regularizer::l1(0.5);
    const Vector expect = reg.prox(z, 1.0);
    reg.prox(z, 1.0, z);
    CHECK(z == expect);
}

TEST_CASE("prox error conditions") {
    CHECK_THROWS_AS(Regularizer::l1(0.1).prox(Vector{1.0}, 0.0), ParameterError);
    CHECK_THROWS_AS(Regularizer::l1(0.1).prox(Vector{1.0}, -1.0), ParameterError);
    CHECK_THROWS_AS(Regularizer::mcp(1.0, 2.0).prox(Vector{1.0}, 2.0), ParameterError);
    CHECK_THROWS_AS(Regularizer::l1(0.1).prox(Vector{std::nan("")}, 1.0), InputError);
    CHECK_THROWS_AS(Regularizer::l1(-1.0), ParameterError);
}

TEST_CASE("values and domains") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(Regularizer::nonneg().value(Vector{-1.0}) == inf);
    CHECK(Regularizer::nonneg().value(Vector{1.0}) == 0.0);
    CHECK(Regularizer::simplex().value(Vector{0.5, 0.5}) == 0.0);
    CHECK(Regularizer::simplex().value(Vector{0.5, 0.6}) == inf);
    CHECK(Regularizer::l1(2.0).value(Vector{1.0, -3.0}) == 8.0);
    CHECK(Regularizer::elastic_net(1.0, 2.0).value(Vector{-1.0}) == 3.0);
    // MCP: nu|x| - x^2/(2 gamma) inside, gamma nu^2 / 2 outside
    CHECK(Regularizer::mcp(1.0, 2.0).value(Vector{1.0}) == doctest::Approx(0.75));
    CHECK(Regularizer::mcp(1.0, 2.0).value(Vector{5.0}) == doctest::Approx(1.0));
    CHECK(Regularizer::box(0.0, 1.0).in_domain(Vector{0.0, 1.0}));
    CHECK_FALSE(Regularizer::box(0.0, 1.0).in_domain(Vector{1.5}));
}

TEST_CASE("brute-force oracle agrees with closed forms") {
    const std::size_t grid = 2001;
    const double radius = 1.0;
    const double h = brute_force_spacing(Regularizer::l1(0.01), 1, radius, grid);
    CHECK(h == doctest::Approx(2.0 * radius / (grid - 1)));

    CHECK(std::fabs(brute_force_prox(Regularizer::zero(), Vector{0.7}, 1.0, radius, grid)[0] - 0.7) <= h);
    CHECK(std::fabs(brute_force_prox(Regularizer::l1(0.01), Vector{-0.005}, 1.0, radius, grid)[0]) <= h);
    CHECK(std::fabs(brute_force_prox(Regularizer::nonneg(), Vector{-0.5}, 1.0, radius, grid)[0]) <= h);

    const Regularizer mcp = Regularizer::mcp(1.0, 2.0);
    const double bf = brute_force_prox(mcp, Vector{0.3}, 1.0, radius, 200001)[0];
    CHECK(std::fabs(bf - mcp.prox(Vector{0.3}, 1.0)[0]) <= 1e-5);

    const Vector sp = brute_force_prox(Regularizer::simplex(), Vector{0.9, 0.3}, 1.0, radius, grid);
    CHECK(sp[0] == doctest::Approx(0.8).epsilon(2e-3));

    CHECK_THROWS_AS(brute_force_prox(Regularizer::zero(), Vector{0.0, 0.0, 0.0}, 1.0, radius, grid), ParameterError);
    CHECK_THROWS_AS(brute_force_prox(Regularizer::zero(), Vector{0.0}, 1.0, radius, 100), ParameterError);
}

TEST_CASE("cocoercivity of the prox maps") {
    Rng rng(8);
    CHECK(check_cocoercivity(Regularizer::l1(0.3), 1.0, 200, 5, rng).holds());
    CHECK(check_cocoercivity(Regularizer::simplex(), 1.0, 200, 5, rng).holds());
    CHECK(check_cocoercivity(Regularizer::zero(), 1.0, 200, 5, rng).holds());
    CHECK(check_cocoercivity(Regularizer::box(-1.0, 0.5), 0.7, 200, 4, rng).holds());
    CHECK(check_cocoercivity(Regularizer::elastic_net(0.2, 0.3), 1.0, 200, 4, rng).holds());
    CHECK(check_cocoercivity(Regularizer::mcp(1.0, 2.0), 1.0, 500, 3, rng).holds());
    const auto report = check_cocoercivity(Regularizer::nonneg(), 1.0, 50, 2, rng);
    CHECK(report.samples == 50);
}
