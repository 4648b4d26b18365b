#include "nprr/problem.hpp"

#include <cmath>
#include <string>

#include "nprr/kernels.hpp"

namespace nprr {

namespace {

constexpr std::size_t kCompensateFrom = 1000;

class FunctionOracle final : public ComponentOracle {
  public:
    FunctionOracle(ValueFn value, GradientFn gradient)
        : value_(std::move(value)), gradient_(std::move(gradient)) {}
    double value(VecView w, std::size_t i) const override { return value_(w, i); }
    void gradient(VecView w, std::size_t i, VecMut out) const override { gradient_(w, i, out); }

  private:
    ValueFn value_;
    GradientFn gradient_;
};

/// Neumaier summation; degenerates to plain summation when disabled.
class Accumulator {
  public:
    explicit Accumulator(bool compensated) : compensated_(compensated) {}
    void add(double x) {
        if (!compensated_) {
            sum_ += x;
            return;
        }
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double result() const { return sum_ + comp_; }

  private:
    bool compensated_;
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class VectorAccumulator {
  public:
    VectorAccumulator(std::size_t dim, bool compensated)
        : compensated_(compensated), sum_(dim, 0.0), comp_(compensated ? dim : 0, 0.0) {}
    void add(VecView x) {
        if (!compensated_) {
            kernels::axpy(1.0, x, sum_);
            return;
        }
        for (std::size_t j = 0; j < sum_.size(); ++j) {
            const double t = sum_[j] + x[j];
            if (std::fabs(sum_[j]) >= std::fabs(x[j]))
                comp_[j] += (sum_[j] - t) + x[j];
            else
                comp_[j] += (x[j] - t) + sum_[j];
            sum_[j] = t;
        }
    }
    void mean_into(std::size_t n, VecMut out) const {
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < sum_.size(); ++j)
            out[j] = (compensated_ ? sum_[j] + comp_[j] : sum_[j]) * inv;
    }

  private:
    bool compensated_;
    Vector sum_;
    Vector comp_;
};

void require_point(const ProblemInstance& p, VecView w) {
    if (w.size() != p.dim)
        throw InputError("point has dimension " + std::to_string(w.size()) + ", expected " +
                         std::to_string(p.dim));
    if (!all_finite(w)) throw InputError("point contains non-finite entries");
}

void gradient_checked(const ProblemInstance& p, VecView w, std::size_t i, VecMut g) {
    p.component_gradient(w, i, g);
    if (!all_finite(g))
        throw DomainError(i, "non-finite gradient of component " + std::to_string(i));
}

}  // namespace

ProblemInstance make_problem(std::size_t n, std::size_t dim, ValueFn value, GradientFn gradient,
                             double lipschitz, double f_lb) {
    ProblemInstance p;
    p.n = n;
    p.dim = dim;
    p.oracle = std::make_shared<FunctionOracle>(std::move(value), std::move(gradient));
    p.lipschitz = lipschitz;
    p.f_lb = f_lb;
    return p;
}

double CompositeObjective::psi(VecView w) const {
    const double phi = regularizer.value(w);
    if (!std::isfinite(phi)) return phi;
    return eval_f(problem, w) + phi;
}

double eval_f(const ProblemInstance& p, VecView w) {
    require_point(p, w);
    Accumulator acc(p.n >= kCompensateFrom);
    for (std::size_t i = 0; i < p.n; ++i) {
        const double v = p.component_value(w, i);
        if (!std::isfinite(v)) throw DomainError(i, "non-finite value of component " + std::to_string(i));
        acc.add(v);
    }
    return acc.result() / static_cast<double>(p.n);
}

void eval_full_grad(const ProblemInstance& p, VecView w, VecMut out) {
    require_point(p, w);
    VectorAccumulator acc(p.dim, p.n >= kCompensateFrom);
    Vector g(p.dim);
    for (std::size_t i = 0; i < p.n; ++i) {
        gradient_checked(p, w, i, g);
        acc.add(g);
    }
    acc.mean_into(p.n, out);
}

Vector eval_full_grad(const ProblemInstance& p, VecView w) {
    Vector out(p.dim);
    eval_full_grad(p, w, out);
    return out;
}

double component_variance(const ProblemInstance& p, VecView w) {
    const Vector mean = eval_full_grad(p, w);
    Accumulator acc(p.n >= kCompensateFrom);
    Vector g(p.dim);
    for (std::size_t i = 0; i < p.n; ++i) {
        gradient_checked(p, w, i, g);
        acc.add(kernels::sq_dist(g, mean));
    }
    return acc.result() / static_cast<double>(p.n);
}

GradientStats gradient_stats(const ProblemInstance& p, VecView w) {
    require_point(p, w);
    const bool comp = p.n >= kCompensateFrom;
    VectorAccumulator acc(p.dim, comp);
    Accumulator sq(comp);
    Vector g(p.dim);
    for (std::size_t i = 0; i < p.n; ++i) {
        gradient_checked(p, w, i, g);
        acc.add(g);
        sq.add(kernels::sum_sq(g));
    }
    GradientStats stats;
    stats.mean.assign(p.dim, 0.0);
    acc.mean_into(p.n, stats.mean);
    const double v = sq.result() / static_cast<double>(p.n) - kernels::sum_sq(stats.mean);
    stats.variance = v > 0.0 ? v : 0.0;
    return stats;
}

VarianceBoundReport check_variance_bound(const ProblemInstance& p, const Regularizer& reg, VecView w) {
    if (!reg.in_domain(w)) throw InputError("variance bound is only defined on dom(phi)");
    VarianceBoundReport r;
    r.lhs = component_variance(p, w);
    const double gap = eval_f(p, w) - p.f_lb;
    r.rhs = p.has_finite_lipschitz() ? 2.0 * p.lipschitz * gap : std::numeric_limits<double>::infinity();
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-9);
    return r;
}

}  // namespace nprr
