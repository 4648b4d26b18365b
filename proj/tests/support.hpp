#pragma once

#include <doctest.h>

#include <cmath>
#include <memory>

#include "nprr/problem.hpp"
#include "nprr/solvers.hpp"

namespace nprr::test {

/// f_i(w) = (1/2)||w - c_i||^2 with component centres c_i.
inline ProblemInstance centred_quadratics(std::vector<Vector> centres) {
    const std::size_t n = centres.size();
    const std::size_t d = centres.front().size();
    auto cs = std::make_shared<std::vector<Vector>>(std::move(centres));
    return make_problem(
        n, d,
        [cs](VecView w, std::size_t i) {
            double s = 0.0;
            for (std::size_t j = 0; j < w.size(); ++j) s += (w[j] - (*cs)[i][j]) * (w[j] - (*cs)[i][j]);
            return 0.5 * s;
        },
        [cs](VecView w, std::size_t i, VecMut out) {
            for (std::size_t j = 0; j < w.size(); ++j) out[j] = w[j] - (*cs)[i][j];
        },
        1.0, 0.0);
}

inline std::shared_ptr<const CompositeObjective> objective(ProblemInstance p, Regularizer reg) {
    return std::make_shared<CompositeObjective>(CompositeObjective{std::move(p), reg});
}

inline double max_diff(VecView a, VecView b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
    return m;
}

inline double sum_sq(VecView a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

}  // namespace nprr::test
