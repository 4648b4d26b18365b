#include "nprr/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "nprr/kernels.hpp"
#include "nprr/random.hpp"

namespace nprr {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::norm_prr: return "norm-prr";
        case Algorithm::e_prr: return "e-prr";
        case Algorithm::psgd: return "psgd";
        case Algorithm::pgd: return "pgd";
        case Algorithm::rr: return "rr";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
    if (text == "norm-prr" || text == "norm_prr") return Algorithm::norm_prr;
    if (text == "e-prr" || text == "e_prr" || text == "prr") return Algorithm::e_prr;
    if (text == "psgd") return Algorithm::psgd;
    if (text == "pgd") return Algorithm::pgd;
    if (text == "rr") return Algorithm::rr;
    throw ParameterError("unknown algorithm '" + text + "'");
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::completed: return "completed";
        case RunStatus::failed_infeasible: return "failed-infeasible";
        case RunStatus::diverged: return "diverged";
    }
    return "unknown";
}

Schedule Schedule::constant(double alpha, std::size_t n) {
    Schedule s;
    s.kind = ScheduleKind::constant;
    s.alpha = alpha;
    s.n = n;
    return s;
}

Schedule Schedule::polynomial(double alpha, double beta, double gamma, std::size_t n, bool divide_by_n) {
    Schedule s;
    s.kind = ScheduleKind::polynomial;
    s.alpha = alpha;
    s.beta = beta;
    s.gamma = gamma;
    s.n = n;
    s.divide_by_n = divide_by_n;
    return s;
}

Schedule Schedule::theory_constant(double eta, std::size_t horizon, std::size_t n) {
    Schedule s;
    s.kind = ScheduleKind::theory_constant;
    s.alpha = eta;
    s.horizon = horizon;
    s.n = n;
    return s;
}

std::string Schedule::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case ScheduleKind::constant: os << "const alpha=" << alpha; break;
        case ScheduleKind::theory_constant: os << "theory eta=" << alpha << " T=" << horizon; break;
        case ScheduleKind::polynomial:
            os << "poly alpha=" << alpha << " beta=" << beta << " gamma=" << gamma;
            if (divide_by_n) os << " per-n";
            break;
    }
    return os.str();
}

void validate(const Schedule& s) {
    if (!(s.alpha > 0.0) || !std::isfinite(s.alpha)) throw ParameterError("schedule alpha must be positive and finite");
    if (s.n == 0) throw ParameterError("schedule n must be >= 1");
    switch (s.kind) {
        case ScheduleKind::constant: break;
        case ScheduleKind::theory_constant:
            if (s.horizon == 0) throw ParameterError("theory schedule needs a horizon T >= 1");
            break;
        case ScheduleKind::polynomial:
            if (!(s.beta >= 0.0) || !std::isfinite(s.beta)) throw ParameterError("schedule beta must be >= 0");
            if (!(s.gamma > 1.0 / 3.0 && s.gamma <= 1.0)) throw ParameterError("schedule gamma must lie in (1/3, 1]");
            break;
    }
}

double step_size(const Schedule& s, std::size_t k) {
    validate(s);
    if (k == 0) throw ParameterError("epochs are numbered from 1");
    const double n = static_cast<double>(s.n);
    switch (s.kind) {
        case ScheduleKind::constant: return s.alpha / n;
        case ScheduleKind::theory_constant:
            // constant in k, so requests past the horizon return the same value
            return s.alpha * std::cbrt(n) / std::cbrt(static_cast<double>(s.horizon)) / n;
        case ScheduleKind::polynomial: {
            const double a = s.alpha / std::pow(s.beta + static_cast<double>(k), s.gamma);
            return s.divide_by_n ? a / n : a;
        }
    }
    return 0.0;
}

double theory_eta_smoothness(const TheoryConstants& c) { return std::cbrt(1.0 / (2.0 * c.L * c.C)); }

double theory_eta_bound(const TheoryConstants& c, std::size_t n, std::size_t horizon) {
    const double cap = c.alpha_bar * std::cbrt(static_cast<double>(horizon)) / std::cbrt(static_cast<double>(n));
    return std::min(theory_eta_smoothness(c), cap);
}

namespace {

using Clock = std::chrono::steady_clock;

bool uses_n(const Schedule& s) {
    return s.kind != ScheduleKind::polynomial || s.divide_by_n;
}

const CompositeObjective& require_config(const RunConfig& cfg) {
    if (!cfg.objective) throw ParameterError("run config has no objective");
    const CompositeObjective& obj = *cfg.objective;
    const ProblemInstance& p = obj.problem;
    if (p.n == 0) throw ParameterError("problem has no components");
    if (cfg.epochs == 0) throw ParameterError("epochs must be >= 1");
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) throw ParameterError("lambda must be positive and finite");
    if (cfg.w_start.size() != p.dim)
        throw InputError("start point has dimension " + std::to_string(cfg.w_start.size()) + ", expected " +
                         std::to_string(p.dim));
    if (!all_finite(cfg.w_start)) throw InputError("start point contains non-finite entries");
    if (cfg.algorithm != Algorithm::pgd) {
        validate(cfg.schedule);
        if (uses_n(cfg.schedule) && cfg.schedule.n != p.n)
            throw ParameterError("schedule n does not match the problem's component count");
    }
    return obj;
}

/// Shared run state: metric evaluation, failure handling and timing.
class Runner {
  public:
    Runner(const RunConfig& cfg, Algorithm algorithm)
        : cfg_(cfg), obj_(require_config(cfg)), normal_(algorithm == Algorithm::norm_prr) {
        trace_.algorithm = algorithm;
        trace_.n = obj_.problem.n;
        trace_.lambda = cfg.lambda;
        const double rho = obj_.regularizer.rho();
        if (cfg.tau) {
            trace_.tau = *cfg.tau;
        } else if (obj_.problem.has_finite_lipschitz() && obj_.problem.lipschitz > 0.0 &&
                   (rho == 0.0 || cfg.lambda < 1.0 / (4.0 * rho))) {
            trace_.tau = theory_constants(obj_.problem.lipschitz, rho, cfg.lambda).tau;
        }
        dim_ = obj_.problem.dim;
    }

    const ProblemInstance& problem() const { return obj_.problem; }
    const Regularizer& reg() const { return obj_.regularizer; }
    std::size_t n() const { return obj_.problem.n; }
    std::size_t dim() const { return dim_; }

    /// Metrics at (z, w); z is ignored unless the run is norm-PRR. Stores
    /// F_nor(z) in last_F_. Returns false (and finalizes the trace) when the
    /// point is infeasible or diverged.
    bool evaluate(VecView z, VecView w, PointMetrics& m) {
        if (!all_finite(w) || (normal_ && !all_finite(z))) return false_with(RunStatus::diverged);
        try {
            const double phi = reg().value(w);
            m.f_value = eval_f(problem(), w);
            m.psi = m.f_value + phi;
            if (!(m.psi <= kDivergencePsi)) return false_with(RunStatus::diverged);
            GradientStats stats = gradient_stats(problem(), w);
            if (cfg_.diagnostics.variance) m.sigma2 = stats.variance;
            m.nat_res = residual_norm(w, stats.mean, cfg_.metric_lambda);
            m.gres = residual_norm(w, stats.mean, cfg_.lambda);
            if (normal_) {
                last_F_ = stats.mean;
                Vector diff(dim_);
                kernels::sub(z, w, diff);
                kernels::axpy(1.0 / cfg_.lambda, diff, last_F_);
                if (cfg_.diagnostics.merit) {
                    const double sq = kernels::sum_sq(last_F_);
                    m.fnor_norm = std::sqrt(sq);
                    if (std::isfinite(trace_.tau)) m.merit = m.psi + 0.5 * trace_.tau * cfg_.lambda * sq;
                }
            }
            if (cfg_.reference) m.ref_dist = std::sqrt(kernels::sq_dist(w, *cfg_.reference));
        } catch (const DomainError&) {
            return false_with(RunStatus::failed_infeasible);
        }
        return true;
    }

    bool guard_fires(VecView w) const { return cfg_.domain_guard && cfg_.domain_guard(w); }

    void start_clock() { t0_ = Clock::now(); }
    void pause_clock() { solver_ms_ += std::chrono::duration<double, std::milli>(Clock::now() - t0_).count(); }

    /// Initial metrics; false when the start point already fails.
    bool begin(VecView z, VecView w) {
        trace_.records.reserve(cfg_.epochs);
        if (guard_fires(w)) {
            pending_status_ = RunStatus::failed_infeasible;
            failed_ = true;
            return false;
        }
        return evaluate(z, w, trace_.initial);
    }

    /// Records epoch k after a successful update. Returns false to stop.
    bool end_epoch(std::size_t k, double alpha, VecView z_prev, VecView z, VecView w_prev, VecView w) {
        EpochRecord rec;
        rec.epoch = k;
        rec.step_size = alpha;
        rec.elapsed_ms = solver_ms_;
        if (guard_fires(w)) return fail(std::move(rec), RunStatus::failed_infeasible);
        Vector F_prev;
        if (normal_) F_prev = last_F_;
        if (!evaluate(z, w, rec.at_end)) return fail(std::move(rec), pending_status_);
        rec.feasible = true;
        rec.step_norm = std::sqrt(kernels::sq_dist(w, w_prev));
        if (normal_ && cfg_.diagnostics.error) {
            // e^k = z^{k+1} - z^k + n alpha_k F_nor(z^k)
            Vector e(dim_);
            kernels::sub(z, z_prev, e);
            kernels::axpy(static_cast<double>(n()) * alpha, F_prev, e);
            rec.err_norm = std::sqrt(kernels::sum_sq(e));
        }
        trace_.records.push_back(std::move(rec));
        if (cfg_.keep_iterates) trace_.iterates.emplace_back(w.begin(), w.end());
        return true;
    }

    /// Stops the run during epoch k with the given status.
    bool fail_epoch(std::size_t k, double alpha, RunStatus status) {
        EpochRecord rec;
        rec.epoch = k;
        rec.step_size = alpha;
        rec.elapsed_ms = solver_ms_;
        return fail(std::move(rec), status);
    }

    Trace finish(VecView w, VecView z) {
        trace_.final_w.assign(w.begin(), w.end());
        if (normal_) trace_.final_z.assign(z.begin(), z.end());
        if (failed_) trace_.status = pending_status_;
        return std::move(trace_);
    }

    bool failed() const { return failed_; }

  private:
    bool false_with(RunStatus status) {
        pending_status_ = status;
        failed_ = true;
        return false;
    }

    bool fail(EpochRecord rec, RunStatus status) {
        pending_status_ = status;
        failed_ = true;
        rec.feasible = false;
        trace_.failure_epoch = rec.epoch;
        trace_.records.push_back(std::move(rec));
        return false;
    }

    double residual_norm(VecView w, VecView grad, double lambda) const {
        if (lambda * reg().rho() >= 1.0) return std::numeric_limits<double>::quiet_NaN();
        Vector u(w.begin(), w.end());
        kernels::axpy(-lambda, grad, u);
        reg().prox(u, lambda, u);
        return std::sqrt(kernels::sq_dist(w, u)) / lambda;
    }

    const RunConfig& cfg_;
    const CompositeObjective& obj_;
    bool normal_;
    std::size_t dim_ = 0;
    Trace trace_;
    Vector last_F_;
    bool failed_ = false;
    RunStatus pending_status_ = RunStatus::completed;
    Clock::time_point t0_{};
    double solver_ms_ = 0.0;
};

bool finite_point(VecView v) { return all_finite(v); }

}  // namespace

Trace run_norm_prr(const RunConfig& cfg) {
    Runner r(cfg, Algorithm::norm_prr);
    if (cfg.lambda * r.reg().rho() >= 1.0) throw ParameterError("norm-PRR needs lambda * rho < 1");
    const std::size_t n = r.n();
    const double inv_lambda = 1.0 / cfg.lambda;
    Vector z = cfg.w_start;
    Vector w = r.reg().prox(z, cfg.lambda);
    if (!r.begin(z, w)) return r.finish(w, z);

    PermutationStream stream(n, cfg.shuffle, cfg.seed);
    Vector g(r.dim()), z_prev(r.dim()), w_prev(r.dim());
    for (std::size_t k = 1; k <= cfg.epochs; ++k) {
        const double alpha = step_size(cfg.schedule, k);
        const Permutation& perm = stream.next();
        z_prev = z;
        w_prev = w;
        r.start_clock();
        bool ok = true;
        try {
            for (std::size_t i = 0; i < n; ++i) {
                r.problem().component_gradient(w, perm[i], g);
                kernels::normal_step(z, w, g, alpha, inv_lambda);
                if (!finite_point(z)) {
                    ok = false;
                    break;
                }
                r.reg().prox(z, cfg.lambda, w);
            }
        } catch (const DomainError&) {
            r.pause_clock();
            r.fail_epoch(k, alpha, RunStatus::failed_infeasible);
            return r.finish(w, z);
        }
        r.pause_clock();
        if (!ok) {
            r.fail_epoch(k, alpha, RunStatus::diverged);
            return r.finish(w, z);
        }
        if (!r.end_epoch(k, alpha, z_prev, z, w_prev, w)) break;
    }
    return r.finish(w, z);
}

Trace run_eprr(const RunConfig& cfg) {
    Runner r(cfg, Algorithm::e_prr);
    const std::size_t n = r.n();
    Vector w = cfg.w_start;
    if (!r.begin(w, w)) return r.finish(w, w);

    PermutationStream stream(n, cfg.shuffle, cfg.seed);
    Vector g(r.dim()), inner(r.dim()), w_prev(r.dim());
    for (std::size_t k = 1; k <= cfg.epochs; ++k) {
        const double alpha = step_size(cfg.schedule, k);
        const double prox_step = static_cast<double>(n) * alpha;
        if (prox_step * r.reg().rho() >= 1.0) throw ParameterError("e-PRR needs n * alpha_k * rho < 1");
        const Permutation& perm = stream.next();
        w_prev = w;
        inner = w;
        r.start_clock();
        RunStatus bad = RunStatus::completed;
        try {
            for (std::size_t i = 0; i < n; ++i) {
                r.problem().component_gradient(inner, perm[i], g);
                kernels::axpy(-alpha, g, inner);
                if (!finite_point(inner)) {
                    bad = RunStatus::diverged;
                    break;
                }
                if (r.guard_fires(inner)) {
                    bad = RunStatus::failed_infeasible;
                    break;
                }
            }
        } catch (const DomainError&) {
            bad = RunStatus::failed_infeasible;
        }
        r.pause_clock();
        if (bad != RunStatus::completed) {
            r.fail_epoch(k, alpha, bad);
            return r.finish(inner, inner);
        }
        r.reg().prox(inner, prox_step, w);
        if (!r.end_epoch(k, alpha, w_prev, w, w_prev, w)) break;
    }
    return r.finish(w, w);
}

Trace run_psgd(const RunConfig& cfg) {
    Runner r(cfg, Algorithm::psgd);
    const std::size_t n = r.n();
    Vector w = cfg.w_start;
    if (!r.begin(w, w)) return r.finish(w, w);

    Vector g(r.dim()), w_prev(r.dim());
    Rng rng;
    for (std::size_t k = 1; k <= cfg.epochs; ++k) {
        const double alpha = step_size(cfg.schedule, k);
        if (alpha * r.reg().rho() >= 1.0) throw ParameterError("PSGD needs alpha_k * rho < 1");
        rng.reseed(derive_seed(cfg.seed, Stream::with_replacement, k));
        w_prev = w;
        r.start_clock();
        RunStatus bad = RunStatus::completed;
        try {
            for (std::size_t s = 0; s < n; ++s) {
                const std::size_t i = cfg.index_override ? cfg.index_override(k, s) : rng.below(n);
                if (i >= n) throw ParameterError("forced component index out of range");
                r.problem().component_gradient(w, i, g);
                kernels::axpy(-alpha, g, w);
                if (!finite_point(w)) {
                    bad = RunStatus::diverged;
                    break;
                }
                r.reg().prox(w, alpha, w);
            }
        } catch (const DomainError&) {
            bad = RunStatus::failed_infeasible;
        }
        r.pause_clock();
        if (bad != RunStatus::completed) {
            r.fail_epoch(k, alpha, bad);
            return r.finish(w, w);
        }
        if (!r.end_epoch(k, alpha, w_prev, w, w_prev, w)) break;
    }
    return r.finish(w, w);
}

Trace run_pgd(const RunConfig& cfg) {
    Runner r(cfg, Algorithm::pgd);
    if (cfg.lambda * r.reg().rho() >= 1.0) throw ParameterError("PGD needs lambda * rho < 1");
    Vector w = cfg.w_start;
    if (!r.begin(w, w)) return r.finish(w, w);

    Vector g(r.dim()), w_prev(r.dim());
    for (std::size_t k = 1; k <= cfg.epochs; ++k) {
        w_prev = w;
        r.start_clock();
        try {
            eval_full_grad(r.problem(), w, g);
        } catch (const DomainError&) {
            r.pause_clock();
            r.fail_epoch(k, cfg.lambda, RunStatus::failed_infeasible);
            return r.finish(w, w);
        }
        kernels::axpy(-cfg.lambda, g, w);
        if (!finite_point(w)) {
            r.pause_clock();
            r.fail_epoch(k, cfg.lambda, RunStatus::diverged);
            return r.finish(w, w);
        }
        r.reg().prox(w, cfg.lambda, w);
        r.pause_clock();
        if (!r.end_epoch(k, cfg.lambda, w_prev, w, w_prev, w)) break;
    }
    return r.finish(w, w);
}

Trace run_rr(const RunConfig& cfg) {
    Runner r(cfg, Algorithm::rr);
    if (r.reg().kind() != RegularizerKind::zero) throw ParameterError("RR is defined for a zero regularizer only");
    const std::size_t n = r.n();
    Vector w = cfg.w_start;
    if (!r.begin(w, w)) return r.finish(w, w);

    PermutationStream stream(n, cfg.shuffle, cfg.seed);
    Vector g(r.dim()), w_prev(r.dim());
    for (std::size_t k = 1; k <= cfg.epochs; ++k) {
        const double alpha = step_size(cfg.schedule, k);
        const Permutation& perm = stream.next();
        w_prev = w;
        r.start_clock();
        RunStatus bad = RunStatus::completed;
        try {
            for (std::size_t i = 0; i < n; ++i) {
                r.problem().component_gradient(w, perm[i], g);
                kernels::axpy(-alpha, g, w);
                if (!finite_point(w)) {
                    bad = RunStatus::diverged;
                    break;
                }
            }
        } catch (const DomainError&) {
            bad = RunStatus::failed_infeasible;
        }
        r.pause_clock();
        if (bad != RunStatus::completed) {
            r.fail_epoch(k, alpha, bad);
            return r.finish(w, w);
        }
        if (!r.end_epoch(k, alpha, w_prev, w, w_prev, w)) break;
    }
    return r.finish(w, w);
}

Trace run(const RunConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::norm_prr: return run_norm_prr(cfg);
        case Algorithm::e_prr: return run_eprr(cfg);
        case Algorithm::psgd: return run_psgd(cfg);
        case Algorithm::pgd: return run_pgd(cfg);
        case Algorithm::rr: return run_rr(cfg);
    }
    throw ParameterError("unknown algorithm");
}

}  // namespace nprr
