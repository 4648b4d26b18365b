#include <algorithm>
#include <cmath>

#include "kernels_internal.hpp"

namespace nprr::kernels::detail {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sum_sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sq_dist(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void sub(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void scale(double a, const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void normal_step(double* z, const double* w, const double* g, double alpha, double inv_lambda,
                 std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = z[i] - alpha * (g[i] + (z[i] - w[i]) * inv_lambda);
}

void soft_threshold(const double* z, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::max(std::fabs(z[i]) - t, 0.0);
        out[i] = std::copysign(mag, z[i]);
    }
}

void clamp(const double* z, double lo, double hi, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::min(std::max(z[i], lo), hi);
}

}  // namespace

const Table kScalarTable{
    Isa::scalar, "scalar", dot, sum_sq, sq_dist, max_abs, axpy, sub, scale, normal_step,
    soft_threshold, clamp,
};

}  // namespace nprr::kernels::detail
