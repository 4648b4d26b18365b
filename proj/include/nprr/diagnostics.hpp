#pragma once

#include <string>
#include <vector>

#include "nprr/solvers.hpp"
#include "nprr/stationarity.hpp"

namespace nprr {

struct Violation {
    std::size_t epoch = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct InequalityReport {
    std::string name;
    std::size_t epochs_checked = 0;
    std::vector<Violation> violations;
    /// max over checked epochs of (lhs - rhs) / max(|rhs|, tiny); <= 0 when all hold.
    double max_relative_violation = 0.0;
    bool holds = true;
    /// false when the trace or schedule does not meet the preconditions.
    bool applicable = true;
    std::string reason;
};

/// ||e^k||^2 <= C n^4 alpha_k^4 (||F_nor(z^k)||^2 + sigma_k^2), relative slack 1e-6.
/// Requires alpha_k <= 1/(sqrt(2C) n) and lambda rho < 1.
InequalityReport check_error_bound(const Trace& trace, const TheoryConstants& c);

/// H(z^{k+1}) <= H(z^k) - (tau n alpha_k / 4)||F_nor(z^k)||^2
///               - ||w^{k+1} - w^k||^2 / (8 n alpha_k) + C n^3 alpha_k^3 sigma_k^2,
/// absolute slack 1e-8. Requires lambda < 1/(4 rho) and alpha_k <= alpha_bar / n.
InequalityReport check_merit_descent(const Trace& trace, const TheoryConstants& c);

/// For every prefix T: min_{k<=T} ||F_nor(z^k)||^2
///   <= (4 + 24 L C sum eta_k^3) / (tau sum eta_k) (H(z^1) - psi_lb),
/// eta_k = n alpha_k, relative slack 1e-6. Requires eta_k <= alpha_bar and
/// sum eta_k^3 <= 1/(2 L C).
InequalityReport check_complexity_bound(const Trace& trace, const TheoryConstants& c, double psi_lb);

/// sigma^2(w^k) <= 2 L (f(w^k) - f_lb) at every recorded point, relative slack 1e-6.
InequalityReport check_variance_along(const Trace& trace, const ProblemInstance& problem);

/// (1 - lambda rho)||G_lambda(w^k)|| <= ||F_nor(z^k)|| at every recorded point,
/// relative slack 1e-6.
InequalityReport check_stat_along(const Trace& trace, double rho);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double correlation = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of log y against log k over the tail fraction `window`
/// of the series. Nonpositive y are dropped with a warning; fewer than 10
/// survivors throw ParameterError.
FitResult fit_loglog(const std::vector<double>& k, const std::vector<double>& y, double window = 0.5);
double fit_rate(const std::vector<double>& k, const std::vector<double>& y, double window = 0.5);

/// Least-squares fit of log y against k (geometric decay shows as a line).
FitResult fit_loglinear(const std::vector<double>& k, const std::vector<double>& y);

std::string format_report(const InequalityReport& r);

}  // namespace nprr
