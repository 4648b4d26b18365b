#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nprr/problem.hpp"
#include "nprr/solvers.hpp"

namespace nprr {

/// Row-sparse data matrix with one label per row (CSR layout).
struct Dataset {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> cols;  // 0-based, ascending within a row
    std::vector<double> vals;
    Vector labels;
    std::string provenance = "synthetic";

    /// entries must have strictly ascending 0-based column indices.
    void add_row(const std::vector<std::pair<std::size_t, double>>& entries, double label);
    static Dataset from_dense(const std::vector<Vector>& rows, const Vector& labels);

    double row_dot(std::size_t i, VecView w) const;
    /// out += a * row_i
    void row_axpy(std::size_t i, double a, VecMut out) const;
    double row_sq_norm(std::size_t i) const;
    Vector dense_row(std::size_t i) const;
    /// Throws DataError on inconsistent sizes or non-finite entries.
    void validate() const;
};

/// LIBSVM text: "<label> idx:val ..." with 1-based indices. Labels 0 are
/// remapped to -1 when every label lies in {-1, 0, +1}. A leading header
/// "n d seed dist" (synthetic dumps) is accepted; '#' lines are skipped.
Dataset read_libsvm(std::istream& in);
Dataset load_libsvm(const std::string& path);
void write_libsvm(std::ostream& out, const Dataset& data);
void save_libsvm(const std::string& path, const Dataset& data);
/// Writes the "n d seed dist" header followed by LIBSVM rows.
void save_synthetic(const std::string& path, const Dataset& data, std::uint64_t seed, const std::string& dist);

/// lambda_max(A^T A) by power iteration (200 steps or relative change < 1e-10).
double spectral_norm_sq(const Dataset& data);
/// 0.8 * lambda_max(A^T A) / n; 0 with a warning for an all-zero matrix.
double estimate_lipschitz(const Dataset& data);

struct BenchmarkBundle {
    std::string name;
    std::shared_ptr<const CompositeObjective> objective;
    /// Recommended solver lambda.
    double lambda = 1.0;
    /// Smoothness constant of the experiment's step-size recipes; distinct
    /// from problem.lipschitz, which bounds every component gradient.
    double schedule_L = std::numeric_limits<double>::quiet_NaN();
    Vector w_start;
    DomainGuard domain_guard;

    const ProblemInstance& problem() const { return objective->problem; }
    const std::optional<KnownSolution>& known_solution() const { return objective->problem.known_solution; }
};

/// n = 100 components [sin(i pi/100) w^2 + log^2(w + i/10)] / 2 (i = 1..n),
/// phi = indicator of w >= 0, L = +inf, start 10, lambda 1, guard w <= -0.1.
BenchmarkBundle make_toy_1d();

enum class SampleDist { uniform, student_t };
std::string to_string(SampleDist dist);
SampleDist parse_sample_dist(const std::string& text);

/// Draw from Student's t with df degrees of freedom.
double sample_student_t(Rng& rng, double df);

/// f(w, i) = (a_i^T w - b_i)^2 / 2 + c^T w over the d-simplex with a planted
/// interpolating solution (support entries 1/support_size).
BenchmarkBundle make_simplex_interpolation(std::size_t n, std::size_t d, std::size_t support_size,
                                           SampleDist dist, std::uint64_t seed);

/// f(w, i) = 1 - tanh(b_i a_i^T w), phi = nu ||w||_1, start 0, lambda 1.
BenchmarkBundle make_tanh_classification(const Dataset& data, double nu = 0.01);
/// Gaussian features with labels planted by a random hyperplane (10% flipped).
Dataset make_gaussian_classification(std::size_t n, std::size_t d, std::uint64_t seed);

/// Least squares (1/2)(a_i^T w - b_i)^2 plus a regularizer; the reference
/// minimizer comes from PGD run to ||G_lambda|| <= 1e-12.
BenchmarkBundle make_quadratic(const std::vector<Vector>& rows, const Vector& b, const Regularizer& reg,
                               const std::string& name = "quadratic");
/// Spectrum of A^T A / n spread over [1/condition_number, 1]; sparse planted
/// signal plus noise, so the solution does not interpolate.
BenchmarkBundle make_quadratic_l1(std::size_t n, std::size_t d, double condition_number, double nu,
                                  std::uint64_t seed);
/// Same data with an MCP penalty (weakly convex).
BenchmarkBundle make_quadratic_mcp(std::size_t n, std::size_t d, double condition_number, double nu,
                                   double gamma, std::uint64_t seed);

}  // namespace nprr
