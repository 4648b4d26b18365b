#include "nprr/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "nprr/kernels.hpp"

namespace nprr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSimplexTol = 1e-9;

void require_param(bool ok, const char* what) {
    if (!ok) throw ParameterError(what);
}

}  // namespace

std::string to_string(RegularizerKind kind) {
    switch (kind) {
        case RegularizerKind::zero: return "zero";
        case RegularizerKind::l1: return "l1";
        case RegularizerKind::box: return "box";
        case RegularizerKind::nonneg: return "nonneg";
        case RegularizerKind::simplex: return "simplex";
        case RegularizerKind::elastic_net: return "elastic-net";
        case RegularizerKind::mcp: return "mcp";
    }
    return "unknown";
}

Regularizer Regularizer::zero() { return {RegularizerKind::zero, 0.0, 0.0}; }

Regularizer Regularizer::l1(double nu) {
    require_param(std::isfinite(nu) && nu >= 0.0, "l1 weight must be finite and >= 0");
    return {RegularizerKind::l1, nu, 0.0};
}

Regularizer Regularizer::box(double lo, double hi) {
    require_param(!std::isnan(lo) && !std::isnan(hi) && lo <= hi, "box bounds must satisfy lo <= hi");
    return {RegularizerKind::box, lo, hi};
}

Regularizer Regularizer::nonneg() { return {RegularizerKind::nonneg, 0.0, kInf}; }

Regularizer Regularizer::simplex() { return {RegularizerKind::simplex, 0.0, 0.0}; }

Regularizer Regularizer::elastic_net(double nu1, double nu2) {
    require_param(std::isfinite(nu1) && nu1 >= 0.0 && std::isfinite(nu2) && nu2 >= 0.0,
                  "elastic-net weights must be finite and >= 0");
    return {RegularizerKind::elastic_net, nu1, nu2};
}

Regularizer Regularizer::mcp(double nu, double gamma) {
    require_param(std::isfinite(nu) && nu >= 0.0, "mcp strength must be finite and >= 0");
    require_param(std::isfinite(gamma) && gamma > 0.0, "mcp concavity must be > 0");
    return {RegularizerKind::mcp, nu, gamma};
}

double Regularizer::rho() const noexcept {
    return kind_ == RegularizerKind::mcp ? 1.0 / b_ : 0.0;
}

bool Regularizer::is_indicator() const noexcept {
    return kind_ == RegularizerKind::box || kind_ == RegularizerKind::nonneg ||
           kind_ == RegularizerKind::simplex;
}

double Regularizer::scalar_value(double x) const {
    switch (kind_) {
        case RegularizerKind::zero: return 0.0;
        case RegularizerKind::l1: return a_ * std::fabs(x);
        case RegularizerKind::box:
        case RegularizerKind::nonneg: return (x >= a_ && x <= b_) ? 0.0 : kInf;
        case RegularizerKind::elastic_net: return a_ * std::fabs(x) + b_ * x * x;
        case RegularizerKind::mcp: {
            const double ax = std::fabs(x);
            if (ax <= b_ * a_) return a_ * ax - x * x / (2.0 * b_);
            return 0.5 * b_ * a_ * a_;
        }
        case RegularizerKind::simplex: break;
    }
    return 0.0;
}

double Regularizer::value(VecView w) const {
    if (kind_ == RegularizerKind::simplex) return in_domain(w) ? 0.0 : kInf;
    double s = 0.0;
    for (double x : w) s += scalar_value(x);
    return s;
}

bool Regularizer::in_domain(VecView w) const {
    switch (kind_) {
        case RegularizerKind::box:
        case RegularizerKind::nonneg:
            return std::all_of(w.begin(), w.end(), [&](double x) { return x >= a_ && x <= b_; });
        case RegularizerKind::simplex: {
            double sum = 0.0;
            for (double x : w) {
                if (!(x >= 0.0)) return false;
                sum += x;
            }
            return std::fabs(sum - 1.0) <= kSimplexTol;
        }
        default: return all_finite(w);
    }
}

void Regularizer::project_simplex(VecView z, VecMut out) const {
    const std::size_t d = z.size();
    Vector u(z.begin(), z.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        cumsum += u[j];
        const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        out[j] = std::max(z[j] - theta, 0.0);
        sum += out[j];
    }
    // rounding in theta leaves |sum - 1| ~ d * eps; renormalise the support
    if (sum > 0.0 && sum != 1.0)
        for (std::size_t j = 0; j < d; ++j) out[j] /= sum;
}

void Regularizer::prox(VecView z, double step, VecMut out) const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("prox step must be positive and finite");
    if (step * rho() >= 1.0) throw ParameterError("prox requires step * rho < 1");
    if (!all_finite(z)) throw InputError("prox input contains non-finite entries");
    const std::size_t d = z.size();

    switch (kind_) {
        case RegularizerKind::zero:
            if (out.data() != z.data()) std::copy(z.begin(), z.end(), out.begin());
            return;
        case RegularizerKind::l1: kernels::soft_threshold(z, step * a_, out); return;
        case RegularizerKind::box:
        case RegularizerKind::nonneg: kernels::clamp(z, a_, b_, out); return;
        case RegularizerKind::elastic_net:
            kernels::soft_threshold(z, step * a_, out);
            kernels::scale(1.0 / (1.0 + 2.0 * step * b_), out, out);
            return;
        case RegularizerKind::mcp: {
            // firm threshold
            const double lo = step * a_;
            const double hi = b_ * a_;
            const double shrink = 1.0 - step / b_;
            for (std::size_t j = 0; j < d; ++j) {
                const double x = z[j];
                const double ax = std::fabs(x);
                if (ax <= lo)
                    out[j] = 0.0;
                else if (ax <= hi)
                    out[j] = std::copysign((ax - lo) / shrink, x);
                else
                    out[j] = x;
            }
            return;
        }
        case RegularizerKind::simplex:
            if (d == 0) throw InputError("simplex projection needs dimension >= 1");
            project_simplex(z, out);
            return;
    }
}

Vector Regularizer::prox(VecView z, double step) const {
    Vector out(z.size());
    prox(z, step, out);
    return out;
}

std::string Regularizer::describe() const {
    std::ostringstream os;
    os << to_string(kind_);
    switch (kind_) {
        case RegularizerKind::l1: os << "(nu=" << a_ << ")"; break;
        case RegularizerKind::box: os << "(lo=" << a_ << ",hi=" << b_ << ")"; break;
        case RegularizerKind::elastic_net: os << "(nu1=" << a_ << ",nu2=" << b_ << ")"; break;
        case RegularizerKind::mcp: os << "(nu=" << a_ << ",gamma=" << b_ << ")"; break;
        default: break;
    }
    return os.str();
}

Vector prox(const Regularizer& reg, VecView z, double step) { return reg.prox(z, step); }

double brute_force_spacing(const Regularizer& reg, std::size_t dim, double radius,
                           std::size_t grid_points) {
    if (reg.kind() == RegularizerKind::simplex) return dim == 1 ? 0.0 : 1.0 / static_cast<double>(grid_points - 1);
    return 2.0 * radius / static_cast<double>(grid_points - 1);
}

Vector brute_force_prox(const Regularizer& reg, VecView z, double step, double radius,
                        std::size_t grid_points) {
    const std::size_t d = z.size();
    if (d == 0 || d > 2) throw ParameterError("brute_force_prox supports dimension 1 or 2 only");
    if (grid_points < 1001) throw ParameterError("brute_force_prox needs at least 1001 grid points");
    if (!(step > 0.0)) throw ParameterError("prox step must be positive");
    if (!(radius > 0.0)) throw ParameterError("grid radius must be positive");

    auto objective = [&](VecView y) {
        const double v = reg.value(y);
        if (!std::isfinite(v)) return kInf;
        double q = 0.0;
        for (std::size_t j = 0; j < d; ++j) q += (z[j] - y[j]) * (z[j] - y[j]);
        return v + q / (2.0 * step);
    };

    Vector best(d, std::numeric_limits<double>::quiet_NaN());
    double best_val = kInf;
    Vector y(d);

    if (reg.kind() == RegularizerKind::simplex) {
        if (d == 1) return Vector{1.0};
        for (std::size_t k = 0; k < grid_points; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(grid_points - 1);
            y[0] = t;
            y[1] = 1.0 - t;
            const double v = objective(y);
            if (v < best_val) {
                best_val = v;
                best = y;
            }
        }
        return best;
    }

    const double h = brute_force_spacing(reg, d, radius, grid_points);
    auto node = [&](std::size_t axis, std::size_t k) {
        return z[axis] - radius + static_cast<double>(k) * h;
    };
    if (d == 1) {
        for (std::size_t k = 0; k < grid_points; ++k) {
            y[0] = node(0, k);
            const double v = objective(y);
            if (v < best_val) {
                best_val = v;
                best = y;
            }
        }
    } else {
        // separable phi: tabulate each axis once, then scan every grid pair
        std::vector<double> axis0(grid_points), axis1(grid_points);
        for (std::size_t k = 0; k < grid_points; ++k) {
            const double a = node(0, k), b = node(1, k);
            axis0[k] = reg.value(Vector{a}) + (z[0] - a) * (z[0] - a) / (2.0 * step);
            axis1[k] = reg.value(Vector{b}) + (z[1] - b) * (z[1] - b) / (2.0 * step);
        }
        std::size_t b0 = 0, b1 = 0;
        for (std::size_t k0 = 0; k0 < grid_points; ++k0) {
            for (std::size_t k1 = 0; k1 < grid_points; ++k1) {
                const double v = axis0[k0] + axis1[k1];
                if (v < best_val) {
                    best_val = v;
                    b0 = k0;
                    b1 = k1;
                }
            }
        }
        best = {node(0, b0), node(1, b1)};
    }
    if (!std::isfinite(best_val)) throw ParameterError("brute_force_prox: grid does not meet the domain");
    return best;
}

CocoercivityReport check_cocoercivity(const Regularizer& reg, double step, std::size_t samples,
                                      std::size_t dim, Rng& rng, double scale) {
    CocoercivityReport report;
    report.samples = samples;
    const double modulus = 1.0 - step * reg.rho();
    Vector w(dim), y(dim), pw(dim), py(dim), dp(dim), dx(dim);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < dim; ++j) {
            w[j] = rng.uniform(-scale, scale);
            y[j] = rng.uniform(-scale, scale);
        }
        reg.prox(w, step, pw);
        reg.prox(y, step, py);
        kernels::sub(pw, py, dp);
        kernels::sub(w, y, dx);
        const double lhs = kernels::dot(dx, dp);
        const double rhs = modulus * kernels::sum_sq(dp) - 1e-9;
        if (lhs < rhs) report.violations.push_back({s, lhs, rhs});
    }
    return report;
}

}  // namespace nprr
