#include <doctest.h>

#include <cmath>

#include "nprr/benchmarks.hpp"
#include "nprr/problem.hpp"
#include "support.hpp"

using namespace nprr;

namespace {

/// f_1(w) = w, f_2(w) = 3w.
ProblemInstance linear_pair() {
    return make_problem(
        2, 1, [](VecView w, std::size_t i) { return (i == 0 ? 1.0 : 3.0) * w[0]; },
        [](VecView, std::size_t i, VecMut out) { out[0] = i == 0 ? 1.0 : 3.0; }, 0.0, -1e300);
}

}  // namespace

TEST_CASE("finite-sum averages") {
    const ProblemInstance half_sq = test::centred_quadratics({{0.0}, {0.0}, {0.0}});
    CHECK(eval_f(half_sq, Vector{0.0}) == 0.0);

    const ProblemInstance p = linear_pair();
    CHECK(eval_f(p, Vector{1.0}) == 2.0);
    CHECK(eval_full_grad(p, Vector{1.0})[0] == 2.0);
    CHECK(component_variance(p, Vector{1.0}) == 1.0);

    const ProblemInstance q = test::centred_quadratics({{0.0, 0.0}});
    const Vector g = eval_full_grad(q, Vector{1.0, 1.0});
    CHECK(g == Vector{1.0, 1.0});
    CHECK(component_variance(q, Vector{3.0, -2.0}) == 0.0);
}

TEST_CASE("toy objective equals the mean of its components") {
    const BenchmarkBundle toy = make_toy_1d();
    const ProblemInstance& p = toy.problem();
    const Vector w = {0.7};
    double s = 0.0;
    for (std::size_t i = 1; i <= 100; ++i) {
        const double l = std::log(0.7 + i / 10.0);
        s += 0.5 * (std::sin(i * M_PI / 100.0) * 0.49 + l * l);
    }
    CHECK(eval_f(p, w) == doctest::Approx(s / 100.0).epsilon(1e-14));
}

TEST_CASE("domain violations carry the component index") {
    const BenchmarkBundle toy = make_toy_1d();
    try {
        eval_f(toy.problem(), Vector{-0.15});
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        // w + i/10 <= 0 first for i = 1 (index 0)
        CHECK(e.index() == 0);
    }
    CHECK_THROWS_AS(eval_full_grad(toy.problem(), Vector{-5.0}), DomainError);
    CHECK_THROWS_AS(eval_f(toy.problem(), Vector{std::nan("")}), InputError);
    CHECK_THROWS_AS(eval_f(toy.problem(), Vector{1.0, 2.0}), InputError);
}

TEST_CASE("one-pass statistics agree with the two-pass definition") {
    const BenchmarkBundle qb = make_quadratic_l1(40, 6, 20.0, 0.05, 3);
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        Vector w(6);
        for (double& x : w) x = rng.uniform(-2.0, 2.0);
        const GradientStats st = gradient_stats(qb.problem(), w);
        const double two_pass = component_variance(qb.problem(), w);
        CHECK(st.variance == doctest::Approx(two_pass).epsilon(1e-10));
        CHECK(test::max_diff(st.mean, eval_full_grad(qb.problem(), w)) <= 1e-12);
    }
}

TEST_CASE("compensated summation for large n") {
    // 1e8 followed by many small values: plain summation loses the small ones
    const std::size_t n = 2001;
    const ProblemInstance p = make_problem(
        n, 1, [](VecView, std::size_t i) { return i == 0 ? 1e16 : 1.0; },
        [](VecView, std::size_t, VecMut out) { out[0] = 0.0; }, 1.0, 0.0);
    const double expect = (1e16 + 2000.0) / static_cast<double>(n);
    CHECK(eval_f(p, Vector{0.0}) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("variance bound") {
    // f_i = (1/2)(w - c_i)^2 with c = {-1, 1}: at w = 1, sigma^2 = 1, f = 1, f_lb = 0, L = 1
    const ProblemInstance p = test::centred_quadratics({{-1.0}, {1.0}});
    const VarianceBoundReport r = check_variance_bound(p, Regularizer::zero(), Vector{1.0});
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.rhs == doctest::Approx(2.0));
    CHECK(r.holds);

    const ProblemInstance z = test::centred_quadratics({{0.0}, {0.0}});
    const VarianceBoundReport r0 = check_variance_bound(z, Regularizer::zero(), Vector{0.0});
    CHECK(r0.lhs == 0.0);
    CHECK(r0.rhs == 0.0);
    CHECK(r0.holds);

    CHECK_THROWS_AS(check_variance_bound(p, Regularizer::nonneg(), Vector{-1.0}), InputError);

    const BenchmarkBundle tanh = make_tanh_classification(make_gaussian_classification(64, 10, 2));
    CHECK(check_variance_bound(tanh.problem(), tanh.objective->regularizer, Vector(10, 0.0)).holds);

    const BenchmarkBundle qb = make_quadratic_l1(32, 5, 10.0, 0.1, 9);
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        Vector w(5);
        for (double& x : w) x = rng.uniform(-3.0, 3.0);
        CHECK(check_variance_bound(qb.problem(), qb.objective->regularizer, w).holds);
    }
}
