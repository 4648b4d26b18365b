#pragma once

// Dense vector kernels used by every inner loop of the solvers.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 implementation. The table is chosen once at startup
// from the CPU features; NPRR_SIMD=scalar|avx2 overrides the choice.
//
// Elementwise kernels are bit-identical across variants (no FMA contraction,
// same operation order per lane). Reductions differ only in summation order.

#include <cstddef>
#include <optional>
#include <string_view>

#include "nprr/core.hpp"

namespace nprr::kernels {

enum class Isa { scalar, avx2 };

struct Table {
    Isa isa;
    const char* name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum_sq)(const double* x, std::size_t n);
    double (*sq_dist)(const double* x, const double* y, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);

    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out = x - y
    void (*sub)(const double* x, const double* y, double* out, std::size_t n);
    // out = a * x
    void (*scale)(double a, const double* x, double* out, std::size_t n);
    // z -= alpha * (g + (z - w) * inv_lambda)
    void (*normal_step)(double* z, const double* w, const double* g, double alpha,
                        double inv_lambda, std::size_t n);
    // out = sign(z) * max(|z| - t, 0)
    void (*soft_threshold)(const double* z, double t, double* out, std::size_t n);
    // out = min(max(z, lo), hi)
    void (*clamp)(const double* z, double lo, double hi, double* out, std::size_t n);
};

const Table& scalar_table();
/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2.
const Table* avx2_table();

const Table& active();
/// Force a variant; returns false (and leaves the selection unchanged) when it
/// is not available on this machine.
bool select(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

inline double dot(VecView x, VecView y) { return active().dot(x.data(), y.data(), x.size()); }
inline double sum_sq(VecView x) { return active().sum_sq(x.data(), x.size()); }
inline double sq_dist(VecView x, VecView y) { return active().sq_dist(x.data(), y.data(), x.size()); }
inline double max_abs(VecView x) { return active().max_abs(x.data(), x.size()); }
inline void axpy(double a, VecView x, VecMut y) { active().axpy(a, x.data(), y.data(), x.size()); }
inline void sub(VecView x, VecView y, VecMut out) { active().sub(x.data(), y.data(), out.data(), x.size()); }
inline void scale(double a, VecView x, VecMut out) { active().scale(a, x.data(), out.data(), x.size()); }
inline void normal_step(VecMut z, VecView w, VecView g, double alpha, double inv_lambda) {
    active().normal_step(z.data(), w.data(), g.data(), alpha, inv_lambda, z.size());
}
inline void soft_threshold(VecView z, double t, VecMut out) {
    active().soft_threshold(z.data(), t, out.data(), z.size());
}
inline void clamp(VecView z, double lo, double hi, VecMut out) {
    active().clamp(z.data(), lo, hi, out.data(), z.size());
}

}  // namespace nprr::kernels
