#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nprr/problem.hpp"
#include "nprr/shuffling.hpp"
#include "nprr/stationarity.hpp"

namespace nprr {

enum class Algorithm {
    norm_prr,  // normal-map proximal random reshuffling
    e_prr,     // epoch-wise proximal RR: n plain steps, one prox per epoch
    psgd,      // proximal SGD, with-replacement sampling
    pgd,       // deterministic proximal gradient
    rr,        // plain random reshuffling (smooth problems only)
};

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

enum class ScheduleKind { constant, theory_constant, polynomial };

/// Per-inner-step size rule alpha_k (constant within epoch k).
///   constant:         alpha_k = alpha / n
///   theory_constant:  alpha_k = (alpha * n^{1/3} / T^{1/3}) / n, alpha = eta
///   polynomial:       alpha_k = alpha / (beta + k)^gamma  (optionally / n)
struct Schedule {
    ScheduleKind kind = ScheduleKind::constant;
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 1.0;
    std::size_t horizon = 0;  // T, theory_constant only
    std::size_t n = 1;
    bool divide_by_n = false;  // polynomial only

    static Schedule constant(double alpha, std::size_t n);
    static Schedule polynomial(double alpha, double beta, double gamma, std::size_t n = 1,
                               bool divide_by_n = false);
    static Schedule theory_constant(double eta, std::size_t horizon, std::size_t n);

    std::string describe() const;
};

/// Throws ParameterError for invalid parameters (polynomial gamma outside
/// (1/3, 1], non-positive alpha, missing horizon, ...).
void validate(const Schedule& s);

/// alpha_k for epoch k >= 1; theory_constant clamps k to the horizon.
double step_size(const Schedule& s, std::size_t k);

/// Largest admissible eta for a theory_constant schedule:
/// min{(2 L C)^{-1/3}, alpha_bar n^{-1/3} T^{1/3}}.
double theory_eta_bound(const TheoryConstants& c, std::size_t n, std::size_t horizon);
/// (2 L C)^{-1/3}.
double theory_eta_smoothness(const TheoryConstants& c);

/// Returns true when the iterate must be treated as outside dom f.
using DomainGuard = std::function<bool(VecView)>;
/// Test hook replacing PSGD's uniform draws: (epoch, step) -> component.
using IndexOverride = std::function<std::size_t(std::size_t, std::size_t)>;

struct Diagnostics {
    bool error = true;     // ||e^k|| (norm-PRR)
    bool merit = true;     // F_nor and H_tau at z^{k+1} (norm-PRR)
    bool variance = true;  // sigma^2 at w^{k+1}
};

struct RunConfig {
    Algorithm algorithm = Algorithm::norm_prr;
    std::shared_ptr<const CompositeObjective> objective;
    double lambda = 1.0;
    Schedule schedule;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    ShuffleMode shuffle = ShuffleMode::independent;
    Diagnostics diagnostics;
    DomainGuard domain_guard;
    /// Start point. norm-PRR sets z^1 = w_start and w^1 = prox(z^1).
    Vector w_start;
    IndexOverride index_override;
    /// lambda of the reported natural residual (||G_1|| by default).
    double metric_lambda = 1.0;
    /// tau for H_tau; derived from theory constants when unset and L finite.
    std::optional<double> tau;
    /// Distances ||w^{k+1} - reference|| are recorded when set.
    std::optional<Vector> reference;
    bool keep_iterates = false;
};

enum class RunStatus { completed, failed_infeasible, diverged };
std::string to_string(RunStatus status);

/// Metrics at one (z, w) pair. NaN marks quantities that are undefined for
/// the algorithm or were not requested.
struct PointMetrics {
    double psi = std::numeric_limits<double>::quiet_NaN();
    double f_value = std::numeric_limits<double>::quiet_NaN();
    double nat_res = std::numeric_limits<double>::quiet_NaN();    // ||G_metric_lambda(w)||
    double gres = std::numeric_limits<double>::quiet_NaN();       // ||G_lambda(w)||, solver lambda
    double fnor_norm = std::numeric_limits<double>::quiet_NaN();  // ||F_nor(z)||
    double merit = std::numeric_limits<double>::quiet_NaN();      // H_tau(z)
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    double ref_dist = std::numeric_limits<double>::quiet_NaN();
};

/// Epoch k's row: metrics after the update (at z^{k+1}, w^{k+1}) plus the
/// epoch's own quantities.
struct EpochRecord {
    std::size_t epoch = 0;
    double step_size = 0.0;
    PointMetrics at_end;
    double err_norm = std::numeric_limits<double>::quiet_NaN();  // ||e^k||
    double step_norm = std::numeric_limits<double>::quiet_NaN();  // ||w^{k+1} - w^k||
    bool feasible = true;
    double elapsed_ms = 0.0;
};

struct Trace {
    Algorithm algorithm = Algorithm::norm_prr;
    std::size_t n = 0;
    double lambda = 0.0;
    double tau = std::numeric_limits<double>::quiet_NaN();
    PointMetrics initial;  // at z^1, w^1
    std::vector<EpochRecord> records;
    std::vector<Vector> iterates;  // w^{k+1} per epoch when keep_iterates
    Vector final_w;
    Vector final_z;
    RunStatus status = RunStatus::completed;
    std::optional<std::size_t> failure_epoch;

    /// Metrics at the start of epoch k (1-based): initial for k = 1.
    const PointMetrics& start_of(std::size_t k) const {
        return k == 1 ? initial : records[k - 2].at_end;
    }
};

Trace run_norm_prr(const RunConfig& cfg);
Trace run_eprr(const RunConfig& cfg);
Trace run_psgd(const RunConfig& cfg);
Trace run_pgd(const RunConfig& cfg);
Trace run_rr(const RunConfig& cfg);

/// Dispatches on cfg.algorithm.
Trace run(const RunConfig& cfg);

/// Divergence guard threshold on psi.
inline constexpr double kDivergencePsi = 1e12;

}  // namespace nprr
