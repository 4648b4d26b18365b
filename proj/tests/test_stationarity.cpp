#include <doctest.h>

#include <cmath>

#include "nprr/benchmarks.hpp"
#include "nprr/stationarity.hpp"
#include "support.hpp"

using namespace nprr;

namespace {

/// f(w) = (1/2)(w - 3)^2 with phi = |w|; minimiser w = 2.
CompositeObjective shifted_l1() { return *test::objective(test::centred_quadratics({{3.0}}), Regularizer::l1(1.0)); }

}  // namespace

TEST_CASE("theory constants") {
    const TheoryConstants a = theory_constants(1.0, 0.0, 1.0);
    CHECK(a.C == doctest::Approx(100.0));
    CHECK(a.tau == doctest::Approx(0.25));
    CHECK(a.alpha_bar == doctest::Approx(1.0 / 1600.0));

    const TheoryConstants b = theory_constants(2.0, 0.0, 0.5);
    CHECK(b.C == doctest::Approx(400.0));
    CHECK(b.tau == doctest::Approx(0.25));
    CHECK(b.alpha_bar == doctest::Approx(1.0 / 3200.0));

    const TheoryConstants c = theory_constants(1.0, 0.5, 0.4);
    CHECK(c.C == doctest::Approx(351.5625));
    CHECK(c.tau == doctest::Approx(0.2 / 1.52));

    CHECK_THROWS_AS(theory_constants(1.0, 0.5, 0.5), ParameterError);
    CHECK_THROWS_AS(theory_constants(std::numeric_limits<double>::infinity(), 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(theory_constants(1.0, 0.0, 0.0), ParameterError);

    CHECK(default_lambda(2.0, 0.0) == 0.5);
    CHECK(default_lambda(1.0, 0.5) == 0.25);
}

TEST_CASE("natural residual") {
    const CompositeObjective obj = shifted_l1();
    CHECK(natural_residual(obj, Vector{2.0}, 1.0)[0] == doctest::Approx(0.0));
    // w = 5: prox(5 - 2, 1) = 2, so G = 3
    CHECK(natural_residual(obj, Vector{5.0}, 1.0)[0] == doctest::Approx(3.0));

    const CompositeObjective smooth = *test::objective(test::centred_quadratics({{2.0}}), Regularizer::zero());
    CHECK(natural_residual(smooth, Vector{4.0}, 1.0)[0] == doctest::Approx(2.0));
    CHECK(natural_residual(smooth, Vector{4.0}, 0.5)[0] == doctest::Approx(2.0));

    const CompositeObjective mcp = *test::objective(test::centred_quadratics({{0.0}}), Regularizer::mcp(1.0, 2.0));
    CHECK_THROWS_AS(natural_residual(mcp, Vector{1.0}, 2.0), ParameterError);
}

TEST_CASE("normal map and merit") {
    const CompositeObjective obj = shifted_l1();
    const NormalMapValue at3 = normal_map(obj, Vector{3.0}, 1.0);
    CHECK(at3.w[0] == doctest::Approx(2.0));
    CHECK(at3.value[0] == doctest::Approx(0.0));
    const NormalMapValue at0 = normal_map(obj, Vector{0.0}, 1.0);
    CHECK(at0.w[0] == 0.0);
    CHECK(at0.value[0] == doctest::Approx(-3.0));

    CHECK(merit(obj, Vector{3.0}, 1.0, 0.25) == doctest::Approx(2.5));
    CHECK(merit(obj, Vector{0.0}, 1.0, 0.25) == doctest::Approx(4.5 + 0.125 * 9.0));
    CHECK_THROWS_AS(merit(obj, Vector{0.0}, 1.0, 0.0), ParameterError);
}

TEST_CASE("normal map at a fixed point of the prox-gradient map vanishes") {
    const BenchmarkBundle q = make_quadratic_l1(32, 4, 10.0, 0.1, 5);
    const auto& known = q.known_solution();
    REQUIRE(known);
    const Vector& w = known->w;
    const Vector g = eval_full_grad(q.problem(), w);
    Vector z(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) z[j] = w[j] - q.lambda * g[j];
    const NormalMapValue F = normal_map(*q.objective, z, q.lambda);
    CHECK(test::max_diff(F.w, w) <= 1e-9);
    double norm = 0.0;
    for (double v : F.value) norm = std::max(norm, std::fabs(v));
    CHECK(norm <= 1e-9);
}

TEST_CASE("residual ordering over random points") {
    Rng rng(21);
    const BenchmarkBundle l1 = make_quadratic_l1(32, 5, 10.0, 0.2, 1);
    const BenchmarkBundle mcp = make_quadratic_mcp(32, 5, 10.0, 0.2, 4.0, 1);
    for (const BenchmarkBundle* b : {&l1, &mcp}) {
        for (int trial = 0; trial < 200; ++trial) {
            Vector z(5);
            for (double& x : z) x = rng.uniform(-5.0, 5.0);
            for (double lambda : {0.01, 0.1, b->lambda}) {
                if (lambda * b->objective->regularizer.rho() >= 1.0) continue;
                const StatReport r = check_stat_inequality(*b->objective, z, lambda);
                CHECK(r.holds);
            }
        }
    }
}

TEST_CASE("subdifferential distance") {
    const CompositeObjective obj = shifted_l1();
    CHECK(*subdifferential_distance(obj, Vector{2.0}) == doctest::Approx(0.0));
    // at 0: -3 + [-1, 1]
    CHECK(*subdifferential_distance(obj, Vector{0.0}) == doctest::Approx(2.0));
    const CompositeObjective simplex = *test::objective(test::centred_quadratics({{0.0, 0.0}}), Regularizer::simplex());
    CHECK_FALSE(subdifferential_distance(simplex, Vector{0.5, 0.5}).has_value());
}
