#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>

#include "nprr/core.hpp"
#include "nprr/prox.hpp"

namespace nprr {

/// Per-component oracles of the finite-sum smooth part f = (1/n) sum_i f(., i).
/// Implementations must be pure: identical (w, i) give identical results.
/// Component indices are 0-based.
class ComponentOracle {
  public:
    virtual ~ComponentOracle() = default;
    virtual double value(VecView w, std::size_t i) const = 0;
    virtual void gradient(VecView w, std::size_t i, VecMut out) const = 0;
};

struct KnownSolution {
    Vector w;
    std::optional<double> psi;
    std::optional<double> sigma2;
    std::optional<double> mu;
    bool interpolating = false;
};

struct ProblemInstance {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::shared_ptr<const ComponentOracle> oracle;
    /// Common Lipschitz modulus of all component gradients; +inf when the
    /// problem admits no global modulus.
    double lipschitz = std::numeric_limits<double>::infinity();
    double f_lb = 0.0;
    std::optional<KnownSolution> known_solution;

    double component_value(VecView w, std::size_t i) const { return oracle->value(w, i); }
    void component_gradient(VecView w, std::size_t i, VecMut out) const { oracle->gradient(w, i, out); }
    bool has_finite_lipschitz() const noexcept { return lipschitz < std::numeric_limits<double>::infinity(); }
};

using ValueFn = std::function<double(VecView, std::size_t)>;
using GradientFn = std::function<void(VecView, std::size_t, VecMut)>;

/// Builds a problem from plain callables (handy for tests and small models).
ProblemInstance make_problem(std::size_t n, std::size_t dim, ValueFn value, GradientFn gradient,
                             double lipschitz, double f_lb);

/// psi = f + phi.
struct CompositeObjective {
    ProblemInstance problem;
    Regularizer regularizer = Regularizer::zero();

    double psi(VecView w) const;
    double psi_lb() const noexcept { return problem.f_lb + regularizer.phi_lb(); }
};

/// (1/n) sum_i f(w, i). Index-ascending; compensated summation for n >= 1000.
double eval_f(const ProblemInstance& p, VecView w);
Vector eval_full_grad(const ProblemInstance& p, VecView w);
void eval_full_grad(const ProblemInstance& p, VecView w, VecMut out);

/// (1/n) sum_i ||grad f(w, i) - grad f(w)||^2, two-pass definition.
double component_variance(const ProblemInstance& p, VecView w);

/// Mean gradient and variance from a single pass over the components via
/// (1/n) sum ||g_i||^2 - ||mean||^2 (clamped at zero).
struct GradientStats {
    Vector mean;
    double variance = 0.0;
};
GradientStats gradient_stats(const ProblemInstance& p, VecView w);

struct VarianceBoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// sigma^2(w) <= 2 L (f(w) - f_lb).
VarianceBoundReport check_variance_bound(const ProblemInstance& p, const Regularizer& reg, VecView w);

}  // namespace nprr
