#pragma once

#include <string>
#include <vector>

#include "nprr/core.hpp"
#include "nprr/random.hpp"

namespace nprr {

enum class RegularizerKind { zero, l1, box, nonneg, simplex, elastic_net, mcp };

std::string to_string(RegularizerKind kind);

/// Nonsmooth part phi of psi = f + phi. Immutable after construction.
///
/// Kinds and parameters:
///   l1          nu * ||w||_1
///   box         indicator of [lo, hi]^d
///   nonneg      indicator of the nonnegative orthant
///   simplex     indicator of {w >= 0, sum(w) = 1}
///   elastic_net nu1 * ||w||_1 + nu2 * ||w||^2
///   mcp         sum_j p(w_j), minimax concave penalty with strength nu and
///               concavity gamma; (1/gamma)-weakly convex
///   zero        phi = 0
class Regularizer {
  public:
    static Regularizer zero();
    static Regularizer l1(double nu);
    static Regularizer box(double lo, double hi);
    static Regularizer nonneg();
    static Regularizer simplex();
    static Regularizer elastic_net(double nu1, double nu2);
    static Regularizer mcp(double nu, double gamma);

    RegularizerKind kind() const noexcept { return kind_; }
    /// Weak-convexity modulus rho (phi + rho/2 ||.||^2 convex).
    double rho() const noexcept;
    double phi_lb() const noexcept { return 0.0; }
    bool is_indicator() const noexcept;
    bool is_separable() const noexcept { return kind_ != RegularizerKind::simplex; }

    /// Extended-real value; +inf outside the domain.
    double value(VecView w) const;
    bool in_domain(VecView w) const;

    /// prox_{step*phi}(z) into out (out may alias z). Throws ParameterError
    /// when step <= 0 or step * rho >= 1, InputError on non-finite z.
    void prox(VecView z, double step, VecMut out) const;
    Vector prox(VecView z, double step) const;

    double param1() const noexcept { return a_; }
    double param2() const noexcept { return b_; }
    std::string describe() const;

  private:
    Regularizer(RegularizerKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    double scalar_value(double x) const;
    void project_simplex(VecView z, VecMut out) const;

    RegularizerKind kind_;
    double a_;
    double b_;
};

/// Free-function form of Regularizer::prox.
Vector prox(const Regularizer& reg, VecView z, double step);

/// Exhaustive grid minimisation of value(y) + ||z - y||^2 / (2 step) over
/// [z - radius, z + radius]^d intersected with the domain. For the simplex the
/// grid is laid on the simplex itself (it has empty interior). d <= 2.
Vector brute_force_prox(const Regularizer& reg, VecView z, double step, double radius,
                        std::size_t grid_points);

/// Spacing of the grid brute_force_prox uses for these arguments.
double brute_force_spacing(const Regularizer& reg, std::size_t dim, double radius,
                           std::size_t grid_points);

struct PairViolation {
    std::size_t sample;
    double lhs;
    double rhs;
};

struct CocoercivityReport {
    std::size_t samples = 0;
    std::vector<PairViolation> violations;
    bool holds() const noexcept { return violations.empty(); }
};

/// Samples pairs (w, y) uniformly from [-scale, scale]^dim and checks
/// <w - y, P(w) - P(y)> >= (1 - step*rho) ||P(w) - P(y)||^2 - 1e-9.
CocoercivityReport check_cocoercivity(const Regularizer& reg, double step, std::size_t samples,
                                      std::size_t dim, Rng& rng, double scale = 3.0);

}  // namespace nprr
