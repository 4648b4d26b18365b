#include "nprr/benchmarks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "nprr/kernels.hpp"
#include "nprr/random.hpp"

namespace nprr {

namespace {

class ToyOracle final : public ComponentOracle {
  public:
    double value(VecView w, std::size_t i) const override {
        const double idx = static_cast<double>(i + 1);
        const double s = shifted(w[0], i);
        const double l = std::log(s);
        return 0.5 * (std::sin(idx * std::numbers::pi / 100.0) * w[0] * w[0] + l * l);
    }
    void gradient(VecView w, std::size_t i, VecMut out) const override {
        const double idx = static_cast<double>(i + 1);
        const double s = shifted(w[0], i);
        out[0] = std::sin(idx * std::numbers::pi / 100.0) * w[0] + std::log(s) / s;
    }

  private:
    static double shifted(double w, std::size_t i) {
        const double s = w + static_cast<double>(i + 1) / 10.0;
        if (!(s > 0.0)) throw DomainError(i, "toy component " + std::to_string(i + 1) + " needs w + i/10 > 0");
        return s;
    }
};

/// (1/2)(a_i^T w - b_i)^2 + c^T w with dense row-major A; c may be empty.
class LeastSquaresOracle final : public ComponentOracle {
  public:
    LeastSquaresOracle(std::size_t d, Vector A, Vector b, Vector c)
        : d_(d), A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {}

    double value(VecView w, std::size_t i) const override {
        const double r = kernels::dot(row(i), w) - b_[i];
        double v = 0.5 * r * r;
        if (!c_.empty()) v += kernels::dot(c_, w);
        return v;
    }
    void gradient(VecView w, std::size_t i, VecMut out) const override {
        const double r = kernels::dot(row(i), w) - b_[i];
        if (c_.empty())
            std::fill(out.begin(), out.end(), 0.0);
        else
            std::copy(c_.begin(), c_.end(), out.begin());
        kernels::axpy(r, row(i), out);
    }

  private:
    VecView row(std::size_t i) const { return VecView(A_).subspan(i * d_, d_); }

    std::size_t d_;
    Vector A_;
    Vector b_;
    Vector c_;
};

class TanhOracle final : public ComponentOracle {
  public:
    explicit TanhOracle(Dataset data) : data_(std::move(data)) {}

    double value(VecView w, std::size_t i) const override {
        const double t = data_.labels[i] * data_.row_dot(i, w);
        // 1 - tanh(t) without cancellation for large t
        return 2.0 / (1.0 + std::exp(2.0 * t));
    }
    void gradient(VecView w, std::size_t i, VecMut out) const override {
        const double b = data_.labels[i];
        const double sech = 1.0 / std::cosh(b * data_.row_dot(i, w));
        std::fill(out.begin(), out.end(), 0.0);
        data_.row_axpy(i, -b * sech * sech, out);
    }

  private:
    Dataset data_;
};

Rng data_rng(std::uint64_t seed) { return Rng(derive_seed(seed, Stream::data, 0)); }

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix to_matrix(const std::vector<Vector>& rows) {
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    RowMatrix A(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != d) throw DataError("rows must share one length");
        for (std::size_t j = 0; j < d; ++j) A(i, j) = rows[i][j];
    }
    return A;
}

/// Eigenvalues of A^T A / n in ascending order.
Eigen::VectorXd gram_spectrum(const RowMatrix& A) {
    const Eigen::MatrixXd G = (A.transpose() * A) / static_cast<double>(A.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double max_row_sq_norm(const RowMatrix& A) { return A.rowwise().squaredNorm().maxCoeff(); }

Vector flatten(const RowMatrix& A) { return Vector(A.data(), A.data() + A.size()); }

double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Eigen::MatrixXd G(rows, cols);
    for (Eigen::Index j = 0; j < G.cols(); ++j)
        for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = standard_normal(rng);
    return G;
}

Eigen::MatrixXd orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(rows, cols, rng));
    return qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

/// Well-conditioned least-squares data: A^T A / n has eigenvalues spread
/// geometrically over [1/kappa, 1]; b = A w_true + 0.1 noise with sparse w_true.
std::pair<std::vector<Vector>, Vector> conditioned_data(std::size_t n, std::size_t d, double kappa, std::uint64_t seed) {
    if (d == 0 || n < d) throw ParameterError("quadratic benchmark needs n >= d >= 1");
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw ParameterError("condition number must be >= 1");
    Rng rng = data_rng(seed);
    const Eigen::MatrixXd U = orthonormal_columns(n, d, rng);
    const Eigen::MatrixXd V = orthonormal_columns(d, d, rng);
    Eigen::VectorXd s(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double t = d == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(d - 1);
        s(static_cast<Eigen::Index>(j)) = std::sqrt(std::pow(kappa, -t));
    }
    const Eigen::MatrixXd A = std::sqrt(static_cast<double>(n)) * U * s.asDiagonal() * V.transpose();

    Vector w_true(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        if (rng.uniform() < 0.5) w_true[j] = standard_normal(rng);
    std::vector<Vector> rows(n, Vector(d));
    Vector b(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) rows[i][j] = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        b[i] = kernels::dot(rows[i], w_true) + 0.1 * standard_normal(rng);
    }
    return {rows, b};
}

}  // namespace

std::string to_string(SampleDist dist) { return dist == SampleDist::uniform ? "uniform" : "student-t"; }

SampleDist parse_sample_dist(const std::string& text) {
    if (text == "uniform") return SampleDist::uniform;
    if (text == "student-t" || text == "student_t" || text == "t") return SampleDist::student_t;
    throw ParameterError("unknown distribution '" + text + "'");
}

double sample_student_t(Rng& rng, double df) {
    if (!(df > 0.0)) throw ParameterError("degrees of freedom must be > 0");
    const double z = standard_normal(rng);
    const double chi2 = std::chi_squared_distribution<double>(df)(rng);
    return z / std::sqrt(chi2 / df);
}

BenchmarkBundle make_toy_1d() {
    ProblemInstance p;
    p.n = 100;
    p.dim = 1;
    p.oracle = std::make_shared<ToyOracle>();
    p.f_lb = 0.0;
    BenchmarkBundle bundle;
    bundle.name = "toy1d";
    bundle.objective = std::make_shared<CompositeObjective>(CompositeObjective{p, Regularizer::nonneg()});
    bundle.lambda = 1.0;
    bundle.w_start = {10.0};
    bundle.domain_guard = [](VecView w) { return w[0] <= -0.1; };
    return bundle;
}

BenchmarkBundle make_simplex_interpolation(std::size_t n, std::size_t d, std::size_t support_size, SampleDist dist,
                                           std::uint64_t seed) {
    if (d == 0 || support_size == 0 || support_size > d) throw ParameterError("simplex benchmark needs 1 <= support <= d");
    if (n < d) throw ParameterError("simplex benchmark needs n >= d for an invertible A^T A");
    Rng rng = data_rng(seed);

    RowMatrix A(n, d);
    Eigen::VectorXd spectrum;
    bool invertible = false;
    for (int attempt = 0; attempt < 100 && !invertible; ++attempt) {
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                A(i, j) = dist == SampleDist::uniform ? rng.uniform() : sample_student_t(rng, 1.5);
        spectrum = gram_spectrum(A);
        invertible = spectrum(0) > 1e-10 * spectrum(spectrum.size() - 1);
    }
    if (!invertible) throw Error("could not draw A with invertible A^T A in 100 attempts");

    Permutation perm(d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < support_size; ++i) std::swap(perm[i], perm[i + rng.below(d - i)]);
    std::vector<bool> on_support(d, false);
    for (std::size_t i = 0; i < support_size; ++i) on_support[perm[i]] = true;

    Vector w_star(d, 0.0), c(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (on_support[j])
            w_star[j] = 1.0 / static_cast<double>(support_size);
        else
            c[j] = rng.uniform();
    }
    Vector flat = flatten(A);
    Vector b(n);
    // same dot kernel as the oracle, so every residual at w* is exactly zero
    for (std::size_t i = 0; i < n; ++i) b[i] = kernels::dot(VecView(flat).subspan(i * d, d), w_star);

    ProblemInstance p;
    p.n = n;
    p.dim = d;
    p.oracle = std::make_shared<LeastSquaresOracle>(d, std::move(flat), std::move(b), c);
    p.lipschitz = max_row_sq_norm(A);
    // c^T w makes each component unbounded below on R^d
    p.f_lb = -std::numeric_limits<double>::infinity();
    KnownSolution known;
    known.w = w_star;
    known.psi = kernels::dot(c, w_star);
    known.sigma2 = 0.0;
    known.mu = spectrum(0);
    known.interpolating = true;
    p.known_solution = known;

    BenchmarkBundle bundle;
    bundle.name = "simplex";
    bundle.objective = std::make_shared<CompositeObjective>(CompositeObjective{p, Regularizer::simplex()});
    bundle.schedule_L = spectrum(spectrum.size() - 1);
    bundle.lambda = 1.0 / bundle.schedule_L;
    bundle.w_start.assign(d, 0.0);
    bundle.w_start[0] = 1.0;
    return bundle;
}

BenchmarkBundle make_tanh_classification(const Dataset& data, double nu) {
    if (data.n == 0) throw DataError("classification needs at least one sample");
    if (!(nu >= 0.0)) throw ParameterError("nu must be >= 0");
    data.validate();
    Dataset d = data;
    double max_sq = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        double& y = d.labels[i];
        if (y == 0.0) y = -1.0;
        if (y != 1.0 && y != -1.0) throw DataError("label " + std::to_string(y) + " at row " + std::to_string(i + 1) + " is not in {-1, 0, +1}");
        max_sq = std::max(max_sq, d.row_sq_norm(i));
    }
    ProblemInstance p;
    p.n = d.n;
    p.dim = d.d;
    // |d^2/dt^2 tanh(t)| <= 4 / (3 sqrt 3)
    p.lipschitz = 4.0 / (3.0 * std::sqrt(3.0)) * max_sq;
    p.f_lb = 0.0;
    const double schedule_L = estimate_lipschitz(d);
    p.oracle = std::make_shared<TanhOracle>(std::move(d));

    BenchmarkBundle bundle;
    bundle.name = "tanh";
    bundle.objective = std::make_shared<CompositeObjective>(CompositeObjective{p, Regularizer::l1(nu)});
    bundle.schedule_L = schedule_L;
    bundle.lambda = 1.0;
    bundle.w_start.assign(p.dim, 0.0);
    return bundle;
}

Dataset make_gaussian_classification(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0 || d == 0) throw ParameterError("classification data needs n, d >= 1");
    Rng rng = data_rng(seed);
    Vector w_true(d);
    for (double& x : w_true) x = standard_normal(rng);
    std::vector<Vector> rows(n, Vector(d));
    Vector labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& x : rows[i]) x = standard_normal(rng);
        double y = kernels::dot(rows[i], w_true) >= 0.0 ? 1.0 : -1.0;
        if (rng.uniform() < 0.1) y = -y;
        labels[i] = y;
    }
    Dataset data = Dataset::from_dense(rows, labels);
    data.provenance = "synthetic";
    return data;
}

BenchmarkBundle make_quadratic(const std::vector<Vector>& rows, const Vector& b, const Regularizer& reg,
                               const std::string& name) {
    if (rows.empty() || rows.size() != b.size()) throw DataError("quadratic needs matching non-empty rows and targets");
    const RowMatrix A = to_matrix(rows);
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    const Eigen::VectorXd spectrum = gram_spectrum(A);

    ProblemInstance p;
    p.n = n;
    p.dim = d;
    p.oracle = std::make_shared<LeastSquaresOracle>(d, flatten(A), b, Vector{});
    p.lipschitz = max_row_sq_norm(A);
    p.f_lb = 0.0;

    BenchmarkBundle bundle;
    bundle.name = name;
    bundle.schedule_L = spectrum(spectrum.size() - 1);
    if (!(bundle.schedule_L > 0.0)) throw DataError("quadratic data matrix is zero");
    bundle.lambda = default_lambda(bundle.schedule_L, reg.rho());
    bundle.w_start.assign(d, 0.0);

    // reference minimizer by PGD, restarted in chunks until ||G_lambda|| <= 1e-12
    RunConfig cfg;
    cfg.algorithm = Algorithm::pgd;
    cfg.objective = std::make_shared<CompositeObjective>(CompositeObjective{p, reg});
    cfg.lambda = bundle.lambda;
    cfg.epochs = 2000;
    cfg.diagnostics = {false, false, false};
    cfg.w_start = bundle.w_start;
    double gres = std::numeric_limits<double>::infinity();
    for (int chunk = 0; chunk < 200 && !(gres <= 1e-12); ++chunk) {
        const Trace t = run_pgd(cfg);
        if (t.status != RunStatus::completed) throw Error("reference PGD run failed");
        cfg.w_start = t.final_w;
        gres = t.records.back().at_end.gres;
    }
    if (!(gres <= 1e-12)) warn(name + ": reference PGD stopped at ||G|| = " + std::to_string(gres));

    KnownSolution known;
    known.w = cfg.w_start;
    known.psi = cfg.objective->psi(known.w);
    known.sigma2 = component_variance(p, known.w);
    if (reg.rho() == 0.0) known.mu = spectrum(0);
    known.interpolating = false;
    p.known_solution = known;
    bundle.objective = std::make_shared<CompositeObjective>(CompositeObjective{p, reg});
    return bundle;
}

BenchmarkBundle make_quadratic_l1(std::size_t n, std::size_t d, double condition_number, double nu, std::uint64_t seed) {
    auto [rows, b] = conditioned_data(n, d, condition_number, seed);
    return make_quadratic(rows, b, Regularizer::l1(nu), "quadratic-l1");
}

BenchmarkBundle make_quadratic_mcp(std::size_t n, std::size_t d, double condition_number, double nu, double gamma,
                                   std::uint64_t seed) {
    auto [rows, b] = conditioned_data(n, d, condition_number, seed);
    return make_quadratic(rows, b, Regularizer::mcp(nu, gamma), "quadratic-mcp");
}

}  // namespace nprr
