#include "nprr/diagnostics.hpp"

#include <cmath>
#include <sstream>

namespace nprr {

namespace {

constexpr double kRelSlack = 1e-6;
constexpr double kMeritSlack = 1e-8;

InequalityReport not_applicable(std::string name, std::string reason) {
    InequalityReport r;
    r.name = std::move(name);
    r.applicable = false;
    r.holds = true;
    r.reason = std::move(reason);
    return r;
}

void record(InequalityReport& r, std::size_t epoch, double lhs, double rhs, double allowed) {
    ++r.epochs_checked;
    const double rel = (lhs - rhs) / std::max(std::fabs(rhs), 1e-300);
    if (r.epochs_checked == 1 || rel > r.max_relative_violation) r.max_relative_violation = rel;
    if (!(lhs <= allowed)) {
        r.violations.push_back({epoch, lhs, rhs});
        r.holds = false;
    }
}

bool is_set(double x) { return !std::isnan(x); }

/// Shared preconditions for the norm-PRR checks; empty string when they hold.
std::string normal_map_trace_issue(const Trace& t, const TheoryConstants& c) {
    if (t.algorithm != Algorithm::norm_prr) return "trace is not a norm-PRR run";
    if (t.records.empty()) return "trace has no epochs";
    if (std::fabs(t.lambda - c.lambda) > 1e-12 * c.lambda) return "constants were computed for a different lambda";
    if (t.lambda * c.rho >= 1.0) return "lambda * rho >= 1";
    return {};
}

std::size_t checked_epochs(const Trace& t) {
    // a failed last epoch carries no metrics
    std::size_t m = t.records.size();
    if (m > 0 && !t.records.back().feasible) --m;
    return m;
}

}  // namespace

InequalityReport check_error_bound(const Trace& t, const TheoryConstants& c) {
    const std::string name = "error-bound";
    if (auto issue = normal_map_trace_issue(t, c); !issue.empty()) return not_applicable(name, issue);
    const double n = static_cast<double>(t.n);
    const double cap = 1.0 / (std::sqrt(2.0 * c.C) * n);
    const std::size_t m = checked_epochs(t);
    for (std::size_t k = 1; k <= m; ++k) {
        const EpochRecord& rec = t.records[k - 1];
        if (rec.step_size > cap * (1.0 + 1e-12)) return not_applicable(name, "alpha_k exceeds 1/(sqrt(2C) n)");
        const PointMetrics& s = t.start_of(k);
        if (!is_set(rec.err_norm) || !is_set(s.fnor_norm) || !is_set(s.sigma2))
            return not_applicable(name, "trace lacks e^k, F_nor or sigma^2");
    }
    InequalityReport r;
    r.name = name;
    for (std::size_t k = 1; k <= m; ++k) {
        const EpochRecord& rec = t.records[k - 1];
        const PointMetrics& s = t.start_of(k);
        const double a = rec.step_size;
        const double lhs = rec.err_norm * rec.err_norm;
        const double rhs = c.C * std::pow(n * a, 4) * (s.fnor_norm * s.fnor_norm + s.sigma2);
        record(r, k, lhs, rhs, rhs * (1.0 + kRelSlack));
    }
    return r;
}

InequalityReport check_merit_descent(const Trace& t, const TheoryConstants& c) {
    const std::string name = "merit-descent";
    if (auto issue = normal_map_trace_issue(t, c); !issue.empty()) return not_applicable(name, issue);
    if (c.rho > 0.0 && t.lambda >= 1.0 / (4.0 * c.rho)) return not_applicable(name, "lambda >= 1/(4 rho)");
    if (!(std::fabs(t.tau - c.tau) <= 1e-12 * c.tau)) return not_applicable(name, "trace tau differs from the constants");
    const double n = static_cast<double>(t.n);
    const std::size_t m = checked_epochs(t);
    for (std::size_t k = 1; k <= m; ++k) {
        const EpochRecord& rec = t.records[k - 1];
        if (rec.step_size * n > c.alpha_bar * (1.0 + 1e-12)) return not_applicable(name, "alpha_k exceeds alpha_bar / n");
        const PointMetrics& s = t.start_of(k);
        if (!is_set(s.merit) || !is_set(rec.at_end.merit) || !is_set(s.fnor_norm) || !is_set(s.sigma2) ||
            !is_set(rec.step_norm))
            return not_applicable(name, "trace lacks H_tau, F_nor or sigma^2");
    }
    InequalityReport r;
    r.name = name;
    for (std::size_t k = 1; k <= m; ++k) {
        const EpochRecord& rec = t.records[k - 1];
        const PointMetrics& s = t.start_of(k);
        const double na = n * rec.step_size;
        const double rhs = s.merit - 0.25 * c.tau * na * s.fnor_norm * s.fnor_norm -
                           rec.step_norm * rec.step_norm / (8.0 * na) + c.C * na * na * na * s.sigma2;
        record(r, k, rec.at_end.merit, rhs, rhs + kMeritSlack);
    }
    return r;
}

InequalityReport check_complexity_bound(const Trace& t, const TheoryConstants& c, double psi_lb) {
    const std::string name = "complexity-bound";
    if (auto issue = normal_map_trace_issue(t, c); !issue.empty()) return not_applicable(name, issue);
    if (c.rho > 0.0 && t.lambda >= 1.0 / (4.0 * c.rho)) return not_applicable(name, "lambda >= 1/(4 rho)");
    if (!(std::fabs(t.tau - c.tau) <= 1e-12 * c.tau)) return not_applicable(name, "trace tau differs from the constants");
    const double n = static_cast<double>(t.n);
    const std::size_t m = checked_epochs(t);
    double eta3 = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double eta = n * t.records[k - 1].step_size;
        if (eta > c.alpha_bar * (1.0 + 1e-12)) return not_applicable(name, "eta_k exceeds alpha_bar");
        eta3 += eta * eta * eta;
        if (!is_set(t.start_of(k).fnor_norm)) return not_applicable(name, "trace lacks F_nor");
    }
    if (eta3 > 1.0 / (2.0 * c.L * c.C) * (1.0 + 1e-12)) return not_applicable(name, "sum eta_k^3 exceeds 1/(2 L C)");
    if (!is_set(t.initial.merit)) return not_applicable(name, "trace lacks H_tau(z^1)");

    InequalityReport r;
    r.name = name;
    const double gap = t.initial.merit - psi_lb;
    double sum_eta = 0.0;
    double sum_eta3 = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t T = 1; T <= m; ++T) {
        const double eta = n * t.records[T - 1].step_size;
        sum_eta += eta;
        sum_eta3 += eta * eta * eta;
        const double f = t.start_of(T).fnor_norm;
        best = std::min(best, f * f);
        const double rhs = (4.0 + 24.0 * c.L * c.C * sum_eta3) / (c.tau * sum_eta) * gap;
        record(r, T, best, rhs, rhs * (1.0 + kRelSlack));
    }
    return r;
}

InequalityReport check_variance_along(const Trace& t, const ProblemInstance& p) {
    const std::string name = "variance-bound";
    if (!p.has_finite_lipschitz()) return not_applicable(name, "problem has no finite L");
    InequalityReport r;
    r.name = name;
    auto check = [&](std::size_t epoch, const PointMetrics& m) {
        if (!is_set(m.sigma2) || !is_set(m.f_value)) return;
        const double rhs = 2.0 * p.lipschitz * (m.f_value - p.f_lb);
        record(r, epoch, m.sigma2, rhs, rhs * (1.0 + kRelSlack));
    };
    check(0, t.initial);
    for (std::size_t k = 1; k <= checked_epochs(t); ++k) check(k, t.records[k - 1].at_end);
    if (r.epochs_checked == 0) return not_applicable(name, "trace lacks sigma^2");
    return r;
}

InequalityReport check_stat_along(const Trace& t, double rho) {
    const std::string name = "stat-ordering";
    if (t.algorithm != Algorithm::norm_prr) return not_applicable(name, "trace is not a norm-PRR run");
    if (t.lambda * rho >= 1.0) return not_applicable(name, "lambda * rho >= 1");
    InequalityReport r;
    r.name = name;
    auto check = [&](std::size_t epoch, const PointMetrics& m) {
        if (!is_set(m.gres) || !is_set(m.fnor_norm)) return;
        const double lhs = (1.0 - t.lambda * rho) * m.gres;
        record(r, epoch, lhs, m.fnor_norm, m.fnor_norm * (1.0 + kRelSlack));
    };
    check(0, t.initial);
    for (std::size_t k = 1; k <= checked_epochs(t); ++k) check(k, t.records[k - 1].at_end);
    if (r.epochs_checked == 0) return not_applicable(name, "trace lacks residuals");
    return r;
}

namespace {

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ParameterError("fit needs at least two distinct abscissae");
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.correlation = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 1.0;
    f.points = x.size();
    return f;
}

std::pair<std::vector<double>, std::vector<double>> positive_points(const std::vector<double>& k,
                                                                    const std::vector<double>& y, std::size_t from,
                                                                    bool log_x) {
    std::vector<double> xs, ys;
    std::size_t dropped = 0;
    for (std::size_t i = from; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i]) || (log_x && !(k[i] > 0.0))) {
            ++dropped;
            continue;
        }
        xs.push_back(log_x ? std::log(k[i]) : k[i]);
        ys.push_back(std::log(y[i]));
    }
    if (dropped > 0) warn("rate fit dropped " + std::to_string(dropped) + " nonpositive points");
    if (xs.size() < 10) throw ParameterError("rate fit needs at least 10 positive points, got " + std::to_string(xs.size()));
    return {xs, ys};
}

}  // namespace

FitResult fit_loglog(const std::vector<double>& k, const std::vector<double>& y, double window) {
    if (k.size() != y.size()) throw ParameterError("rate fit needs matching k and y");
    if (!(window > 0.0 && window <= 1.0)) throw ParameterError("rate window must lie in (0, 1]");
    const std::size_t from = y.size() - static_cast<std::size_t>(std::floor(window * static_cast<double>(y.size())));
    auto [xs, ys] = positive_points(k, y, from, true);
    return linear_fit(xs, ys);
}

double fit_rate(const std::vector<double>& k, const std::vector<double>& y, double window) {
    return fit_loglog(k, y, window).slope;
}

FitResult fit_loglinear(const std::vector<double>& k, const std::vector<double>& y) {
    if (k.size() != y.size()) throw ParameterError("fit needs matching k and y");
    auto [xs, ys] = positive_points(k, y, 0, false);
    return linear_fit(xs, ys);
}

std::string format_report(const InequalityReport& r) {
    std::ostringstream os;
    os << r.name << ": ";
    if (!r.applicable) {
        os << "not applicable (" << r.reason << ")";
        return os.str();
    }
    os << (r.holds ? "holds" : "VIOLATED") << " epochs=" << r.epochs_checked << " violations=" << r.violations.size()
       << " max_rel=" << r.max_relative_violation;
    return os.str();
}

}  // namespace nprr
