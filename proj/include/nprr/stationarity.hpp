#pragma once

#include <optional>

#include "nprr/problem.hpp"

namespace nprr {

/// Constants of the descent analysis for given (L, rho, lambda):
///   C         = 4 [(3L + 2/lambda - rho) / (1 - lambda rho)]^2
///   tau       = (1 - 4 lambda rho) / (2 (1 - 2 lambda rho + lambda^2 L^2))
///   alpha_bar = 1 / max{sqrt(2C), 10L, 4 C lambda / tau}
struct TheoryConstants {
    double C = 0.0;
    double tau = 0.0;
    double alpha_bar = 0.0;
    double lambda = 0.0;
    double L = 0.0;
    double rho = 0.0;
};

/// Requires L > 0 finite, rho >= 0, 0 < lambda < 1/(4 rho).
TheoryConstants theory_constants(double L, double rho, double lambda);

/// 1/L for convex phi, min(1/L, 1/(8 rho)) otherwise.
double default_lambda(double L, double rho);

/// G_lambda(w) = (w - prox(w - lambda grad f(w), lambda)) / lambda.
Vector natural_residual(const CompositeObjective& obj, VecView w, double lambda);

struct NormalMapValue {
    Vector value;  // F_nor(z) = grad f(w) + (z - w) / lambda, an element of d psi(w)
    Vector w;      // prox(z, lambda)
};

NormalMapValue normal_map(const CompositeObjective& obj, VecView z, double lambda);

/// H_tau(z) = psi(prox(z)) + (tau lambda / 2) ||F_nor(z)||^2.
double merit(const CompositeObjective& obj, VecView z, double lambda, double tau);

struct StatReport {
    double lhs = 0.0;  // (1 - lambda rho) ||G_lambda(prox(z))||
    double rhs = 0.0;  // ||F_nor(z)||
    bool holds = false;
};

StatReport check_stat_inequality(const CompositeObjective& obj, VecView z, double lambda);

/// dist(0, d psi(w)) for separable convex phi (zero, l1, elastic-net, box,
/// nonneg); nullopt for the remaining kinds.
std::optional<double> subdifferential_distance(const CompositeObjective& obj, VecView w);

}  // namespace nprr
