#include "nprr/stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "nprr/kernels.hpp"

namespace nprr {

namespace {

void require_lambda(const Regularizer& reg, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be positive and finite");
    if (lambda * reg.rho() >= 1.0) throw ParameterError("lambda * rho must be < 1");
}

}  // namespace

TheoryConstants theory_constants(double L, double rho, double lambda) {
    if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("theory constants need a finite L > 0");
    if (!(rho >= 0.0)) throw ParameterError("rho must be >= 0");
    if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
    if (rho > 0.0 && lambda >= 1.0 / (4.0 * rho)) throw ParameterError("lambda must be < 1/(4 rho)");

    TheoryConstants c;
    c.L = L;
    c.rho = rho;
    c.lambda = lambda;
    const double ratio = (3.0 * L + 2.0 / lambda - rho) / (1.0 - lambda * rho);
    c.C = 4.0 * ratio * ratio;
    c.tau = (1.0 - 4.0 * lambda * rho) / (2.0 * (1.0 - 2.0 * lambda * rho + lambda * lambda * L * L));
    c.alpha_bar = 1.0 / std::max({std::sqrt(2.0 * c.C), 10.0 * L, 4.0 * c.C * lambda / c.tau});
    return c;
}

double default_lambda(double L, double rho) {
    if (rho <= 0.0) return 1.0 / L;
    return std::min(1.0 / L, 1.0 / (8.0 * rho));
}

Vector natural_residual(const CompositeObjective& obj, VecView w, double lambda) {
    require_lambda(obj.regularizer, lambda);
    Vector g = eval_full_grad(obj.problem, w);
    Vector u(w.begin(), w.end());
    kernels::axpy(-lambda, g, u);
    obj.regularizer.prox(u, lambda, u);
    Vector r(w.size());
    kernels::sub(w, u, r);
    kernels::scale(1.0 / lambda, r, r);
    return r;
}

NormalMapValue normal_map(const CompositeObjective& obj, VecView z, double lambda) {
    require_lambda(obj.regularizer, lambda);
    NormalMapValue out;
    out.w = obj.regularizer.prox(z, lambda);
    out.value = eval_full_grad(obj.problem, out.w);
    Vector diff(z.size());
    kernels::sub(z, out.w, diff);
    kernels::axpy(1.0 / lambda, diff, out.value);
    return out;
}

double merit(const CompositeObjective& obj, VecView z, double lambda, double tau) {
    if (!(tau > 0.0)) throw ParameterError("tau must be > 0");
    const NormalMapValue F = normal_map(obj, z, lambda);
    return obj.psi(F.w) + 0.5 * tau * lambda * kernels::sum_sq(F.value);
}

StatReport check_stat_inequality(const CompositeObjective& obj, VecView z, double lambda) {
    const NormalMapValue F = normal_map(obj, z, lambda);
    StatReport r;
    r.lhs = (1.0 - lambda * obj.regularizer.rho()) * std::sqrt(kernels::sum_sq(natural_residual(obj, F.w, lambda)));
    r.rhs = std::sqrt(kernels::sum_sq(F.value));
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-9);
    return r;
}

std::optional<double> subdifferential_distance(const CompositeObjective& obj, VecView w) {
    const Regularizer& reg = obj.regularizer;
    const RegularizerKind kind = reg.kind();
    if (kind == RegularizerKind::simplex || kind == RegularizerKind::mcp) return std::nullopt;
    if (!reg.in_domain(w)) return std::nullopt;

    const Vector g = eval_full_grad(obj.problem, w);
    double sq = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        double gj = g[j];
        double dj = 0.0;
        switch (kind) {
            case RegularizerKind::zero: dj = std::fabs(gj); break;
            case RegularizerKind::elastic_net:
                gj += 2.0 * reg.param2() * w[j];
                [[fallthrough]];
            case RegularizerKind::l1: {
                const double nu = reg.param1();
                if (w[j] != 0.0)
                    dj = std::fabs(gj + std::copysign(nu, w[j]));
                else
                    dj = std::max(std::fabs(gj) - nu, 0.0);
                break;
            }
            case RegularizerKind::box:
            case RegularizerKind::nonneg: {
                const double lo = reg.param1();
                const double hi = reg.param2();
                const bool at_lo = w[j] == lo;
                const bool at_hi = w[j] == hi;
                if (at_lo && at_hi)
                    dj = 0.0;
                else if (at_lo)
                    dj = std::max(-gj, 0.0);
                else if (at_hi)
                    dj = std::max(gj, 0.0);
                else
                    dj = std::fabs(gj);
                break;
            }
            default: break;
        }
        sq += dj * dj;
    }
    return std::sqrt(sq);
}

}  // namespace nprr
