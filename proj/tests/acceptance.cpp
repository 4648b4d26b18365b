// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [path-to-nprr-cli]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nprr/benchmarks.hpp"
#include "nprr/diagnostics.hpp"
#include "nprr/harness.hpp"
#include "nprr/shuffling.hpp"
#include "nprr/solvers.hpp"

using namespace nprr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double inf_norm_diff(VecView a, VecView b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
    return m;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

RunConfig base_run(const BenchmarkBundle& b, Algorithm a, const Schedule& s, std::size_t epochs, std::uint64_t seed) {
    RunConfig rc;
    rc.algorithm = a;
    rc.objective = b.objective;
    rc.lambda = b.lambda;
    rc.schedule = s;
    rc.epochs = epochs;
    rc.seed = seed;
    rc.w_start = b.w_start;
    rc.domain_guard = b.domain_guard;
    return rc;
}

// 1. prox against the brute-force grid oracle
Outcome prox_equivalence() {
    Rng rng(101);
    const std::size_t grid = 2001;
    const char* names[] = {"zero", "l1", "box", "nonneg", "simplex", "elastic-net", "mcp"};
    double worst_ratio = 0.0;
    std::string worst_kind;
    for (int kind = 0; kind < 7; ++kind) {
        for (int inst = 0; inst < 100; ++inst) {
            const std::size_t d = inst % 3 == 0 ? 2 : 1;
            double step = rng.uniform(0.1, 2.0);
            Regularizer reg = Regularizer::zero();
            switch (kind) {
                case 1: reg = Regularizer::l1(rng.uniform(0.0, 1.0)); break;
                case 2: reg = Regularizer::box(rng.uniform(-2.0, 0.0), rng.uniform(0.0, 2.0)); break;
                case 3: reg = Regularizer::nonneg(); break;
                case 4: reg = Regularizer::simplex(); break;
                case 5: reg = Regularizer::elastic_net(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)); break;
                case 6: {
                    const double gamma = rng.uniform(1.5, 4.0);
                    reg = Regularizer::mcp(rng.uniform(0.1, 1.0), gamma);
                    step = rng.uniform(0.1, 1.0);
                    break;
                }
                default: break;
            }
            Vector z(d);
            for (double& x : z) x = rng.uniform(-2.0, 2.0);
            // every prox here moves a point of [-2, 2]^d by at most 4 per coordinate
            const double radius = 4.5;
            const Vector p = reg.prox(z, step);
            const Vector bf = brute_force_prox(reg, z, step, radius, grid);
            double h = brute_force_spacing(reg, d, radius, grid);
            if (h == 0.0) h = 1e-12;
            const double ratio = inf_norm_diff(p, bf) / h;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst_kind = names[kind];
            }
        }
    }
    return {worst_ratio <= 2.0, "700 instances, worst |prox - grid| = " + fmt("%.3g", worst_ratio) +
                                    " spacings (" + (worst_kind.empty() ? "none" : worst_kind) + "), limit 2"};
}

// 2. finite differences on every benchmark
Outcome gradient_checks() {
    const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    std::vector<std::pair<std::string, BenchmarkBundle>> benches;
    benches.emplace_back("toy1d", make_toy_1d());
    benches.emplace_back("simplex-uniform", make_simplex_interpolation(500, 50, 5, SampleDist::uniform, 1));
    benches.emplace_back("simplex-t", make_simplex_interpolation(500, 50, 5, SampleDist::student_t, 1));
    benches.emplace_back("tanh", make_tanh_classification(make_gaussian_classification(64, 10, 1)));
    benches.emplace_back("quadratic-l1", make_quadratic_l1(32, 8, 10.0, 0.01, 1));
    benches.emplace_back("quadratic-mcp", make_quadratic_mcp(32, 8, 10.0, 0.01, 4.0, 1));
    Rng rng(202);
    double worst = 0.0;
    std::string worst_name;
    for (const auto& [name, b] : benches) {
        const ProblemInstance& p = b.problem();
        for (int trial = 0; trial < 20; ++trial) {
            Vector w(p.dim);
            for (double& x : w) x = name == "toy1d" ? rng.uniform(0.0, 10.0) : rng.uniform(-1.0, 1.0);
            const std::size_t i = rng.below(p.n);
            double norm = 0.0;
            for (double x : w) norm += x * x;
            const double h = h0 * (1.0 + std::sqrt(norm));
            Vector g(p.dim), x = w;
            p.component_gradient(w, i, g);
            double err = 0.0, gmax = 0.0;
            for (std::size_t j = 0; j < p.dim; ++j) {
                x[j] = w[j] + h;
                const double up = p.component_value(x, i);
                x[j] = w[j] - h;
                const double down = p.component_value(x, i);
                x[j] = w[j];
                err = std::max(err, std::fabs((up - down) / (2.0 * h) - g[j]));
                gmax = std::max(gmax, std::fabs(g[j]));
            }
            const double rel = err / std::max(1.0, gmax);
            if (rel > worst) {
                worst = rel;
                worst_name = name;
            }
        }
    }
    return {worst <= 1e-6, "6 benchmarks x 20 points, worst relative error " + fmt("%.3g", worst) + " (" + worst_name + ")"};
}

// 3. exact reductions to PGD and RR
Outcome reductions() {
    // n = 1: norm-PRR with alpha = lambda is PGD
    const BenchmarkBundle single = make_quadratic({{1.0, 2.0, -0.5}}, {1.5}, Regularizer::l1(0.2), "single");
    RunConfig a = base_run(single, Algorithm::norm_prr, Schedule::constant(single.lambda, 1), 100, 1);
    a.w_start = {2.0, -1.0, 3.0};
    a.keep_iterates = true;
    // norm-PRR's first iterate is w^1 = prox(z^1); PGD starts there
    RunConfig b = a;
    b.algorithm = Algorithm::pgd;
    b.w_start = single.objective->regularizer.prox(a.w_start, a.lambda);
    const Trace ta = run(a), tb = run(b);
    double d1 = 0.0;
    for (std::size_t k = 0; k < ta.iterates.size(); ++k) d1 = std::max(d1, inf_norm_diff(ta.iterates[k], tb.iterates[k]));

    // phi = 0: norm-PRR is RR
    Rng rng(303);
    std::vector<Vector> rows(32, Vector(6));
    Vector targets(32);
    for (auto& r : rows)
        for (double& x : r) x = rng.uniform(-1.0, 1.0);
    for (double& t : targets) t = rng.uniform(-1.0, 1.0);
    const BenchmarkBundle smooth = make_quadratic(rows, targets, Regularizer::zero(), "smooth");
    RunConfig c = base_run(smooth, Algorithm::norm_prr, Schedule::polynomial(0.5 / smooth.schedule_L, 1.0, 0.7, 32, true), 100, 7);
    c.keep_iterates = true;
    RunConfig r = c;
    r.algorithm = Algorithm::rr;
    const Trace tc = run(c), tr = run(r);
    double d2 = 0.0;
    for (std::size_t k = 0; k < tc.iterates.size(); ++k) d2 = std::max(d2, inf_norm_diff(tc.iterates[k], tr.iterates[k]));
    const bool ok = ta.iterates.size() == 100 && tc.iterates.size() == 100 && d1 <= 1e-12 && d2 <= 1e-12;
    return {ok, "max iterate gap vs PGD " + fmt("%.3g", d1) + ", vs RR " + fmt("%.3g", d2) + " over 100 epochs"};
}

// 4. inequality suite
Outcome inequality_suite() {
    struct Case {
        std::string name;
        BenchmarkBundle bundle;
    };
    std::vector<Case> cases;
    cases.push_back({"tanh", make_tanh_classification(make_gaussian_classification(64, 10, 1))});
    cases.push_back({"quadratic-l1", make_quadratic_l1(32, 8, 10.0, 0.01, 1)});
    cases.push_back({"quadratic-mcp", make_quadratic_mcp(32, 8, 10.0, 0.05, 4.0, 1)});
    const std::size_t T = 200;
    std::size_t reports = 0, failures = 0, epochs = 0;
    std::string first_failure;
    for (const Case& cs : cases) {
        const ProblemInstance& p = cs.bundle.problem();
        const double rho = cs.bundle.objective->regularizer.rho();
        const TheoryConstants c = theory_constants(p.lipschitz, rho, cs.bundle.lambda);
        // constant eta = min{(2LC)^{-1/3} T^{-1/3}, alpha_bar}; decaying eta_k = alpha_bar * 2 / (1 + k)
        const double eta = std::min(theory_eta_smoothness(c) / std::cbrt(double(T)), c.alpha_bar);
        const std::vector<Schedule> schedules = {Schedule::constant(eta, p.n),
                                                 Schedule::polynomial(2.0 * c.alpha_bar, 1.0, 1.0, p.n, true)};
        for (std::size_t s = 0; s < schedules.size(); ++s) {
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                const Trace t = run(base_run(cs.bundle, Algorithm::norm_prr, schedules[s], T, seed));
                epochs += t.records.size();
                for (const InequalityReport& r :
                     {check_error_bound(t, c), check_variance_along(t, p), check_merit_descent(t, c),
                      check_complexity_bound(t, c, cs.bundle.objective->psi_lb()), check_stat_along(t, rho)}) {
                    ++reports;
                    if (!r.applicable || !r.holds || r.epochs_checked < T) {
                        ++failures;
                        if (first_failure.empty())
                            first_failure = cs.name + " schedule " + std::to_string(s) + " seed " + std::to_string(seed) +
                                            ": " + format_report(r);
                    }
                }
            }
        }
    }
    std::string detail = std::to_string(reports) + " reports over " + std::to_string(epochs) + " epochs, " +
                         std::to_string(failures) + " failing";
    if (!first_failure.empty()) detail += "; first: " + first_failure;
    return {failures == 0, detail};
}

// 5. without-replacement sampling law
Outcome sampling_law() {
    Rng rng(505);
    double worst_exact = 0.0;
    for (std::size_t n = 1; n <= 8; ++n) {
        std::vector<Vector> xs(n, Vector(3));
        for (auto& x : xs)
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
        Vector mean(3, 0.0);
        for (const auto& x : xs)
            for (std::size_t j = 0; j < 3; ++j) mean[j] += x[j] / double(n);
        for (std::size_t t = 1; t <= n; ++t) {
            // every t-subset is equally likely as the first t entries of a uniform permutation
            double total = 0.0;
            std::size_t subsets = 0;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                if (static_cast<std::size_t>(__builtin_popcount(mask)) != t) continue;
                Vector m(3, 0.0);
                for (std::size_t i = 0; i < n; ++i)
                    if (mask >> i & 1u)
                        for (std::size_t j = 0; j < 3; ++j) m[j] += xs[i][j] / double(t);
                double sq = 0.0;
                for (std::size_t j = 0; j < 3; ++j) sq += (m[j] - mean[j]) * (m[j] - mean[j]);
                total += sq;
                ++subsets;
            }
            worst_exact = std::max(worst_exact, std::fabs(total / double(subsets) - expected_partial_variance(xs, t)));
        }
    }
    std::vector<Vector> big(50, Vector(4));
    for (auto& x : big)
        for (double& v : x) v = rng.uniform(-1.0, 3.0);
    double worst_z = 0.0;
    for (std::size_t t : {1, 10, 25, 49}) {
        const auto est = partial_mean_variance_mc(big, t, 100000, rng);
        worst_z = std::max(worst_z, std::fabs(est.var_est - expected_partial_variance(big, t)) / est.std_error);
    }
    return {worst_exact <= 1e-12 && worst_z <= 3.0,
            "enumeration gap " + fmt("%.3g", worst_exact) + " (n <= 8), Monte-Carlo worst " + fmt("%.2f", worst_z) +
                " standard errors (n = 50, t in {1,10,25,49})"};
}

// 6. feasibility on the toy problem
Outcome feasibility() {
    const BenchmarkBundle toy = make_toy_1d();
    const Schedule s = Schedule::polynomial(1.0, 0.0, 1.0);
    int eprr_failed = 0, nprr_ok = 0, psgd_ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        if (run(base_run(toy, Algorithm::e_prr, s, 100, seed)).status == RunStatus::failed_infeasible) ++eprr_failed;
        for (Algorithm a : {Algorithm::norm_prr, Algorithm::psgd}) {
            RunConfig rc = base_run(toy, a, s, 100, seed);
            rc.keep_iterates = true;
            const Trace t = run(rc);
            bool ok = t.status == RunStatus::completed && t.iterates.size() == 100;
            for (const Vector& w : t.iterates) ok = ok && w[0] >= 0.0;
            if (ok) ++(a == Algorithm::norm_prr ? nprr_ok : psgd_ok);
        }
    }
    return {eprr_failed >= 8 && nprr_ok == 10 && psgd_ok == 10,
            "e-PRR infeasible in " + std::to_string(eprr_failed) + "/10, norm-PRR feasible " + std::to_string(nprr_ok) +
                "/10, PSGD feasible " + std::to_string(psgd_ok) + "/10"};
}

// 7. interpolation: linear rate for norm-PRR, stall for e-PRR
Outcome interpolation() {
    const BenchmarkBundle b = make_simplex_interpolation(500, 50, 5, SampleDist::uniform, 1);
    const double L = b.schedule_L;
    const Schedule s = Schedule::constant(4.0 / L, 500);
    const double psi_star = b.known_solution()->psi.value();
    const std::size_t epochs = 3000;
    auto rel_errs = [&](Algorithm a) {
        const Trace t = run(base_run(b, a, s, epochs, 1));
        std::vector<double> e;
        for (const auto& rec : t.records) e.push_back((rec.at_end.psi - psi_star) / std::max(1.0, psi_star));
        return e;
    };
    const std::vector<double> nprr = rel_errs(Algorithm::norm_prr);
    const std::vector<double> eprr = rel_errs(Algorithm::e_prr);
    std::size_t hit = 0;
    for (std::size_t k = 0; k < nprr.size(); ++k)
        if (nprr[k] < 1e-8) {
            hit = k + 1;
            break;
        }
    // decaying segment: the later half of the epochs before the error first reaches 1e-13,
    // which skips the support-identification transient
    std::size_t floor_at = 0;
    while (floor_at < nprr.size() && nprr[floor_at] > 1e-13) ++floor_at;
    std::vector<double> ks, ys;
    for (std::size_t k = floor_at / 2; k < floor_at; ++k) {
        ks.push_back(double(k + 1));
        ys.push_back(nprr[k]);
    }
    double corr = 0.0, slope = 0.0;
    if (ks.size() >= 10) {
        const FitResult f = fit_loglinear(ks, ys);
        corr = f.correlation;
        slope = f.slope;
    }
    const double nf = std::max(nprr.back(), 1e-300);
    const double ratio = eprr.back() / nf;
    const bool ok = hit > 0 && corr <= -0.99 && ratio >= 1e3;
    return {ok, "norm-PRR below 1e-8 at epoch " + std::to_string(hit) + ", log-linear slope " + fmt("%.3g", slope) +
                    " corr " + fmt("%.4f", corr) + " over " + std::to_string(ks.size()) + " epochs; final errors e-PRR " +
                    fmt("%.3g", eprr.back()) + " vs norm-PRR " + fmt("%.3g", nprr.back()) + " (ratio " + fmt("%.3g", ratio) + ")"};
}

// 8. complexity trend on the tanh benchmark
Outcome complexity_trend() {
    const BenchmarkBundle b = make_tanh_classification(make_gaussian_classification(64, 10, 1));
    const ProblemInstance& p = b.problem();
    const TheoryConstants c = theory_constants(p.lipschitz, b.objective->regularizer.rho(), b.lambda);
    const double eta = theory_eta_smoothness(c);
    std::vector<double> Ts, ys;
    std::string detail;
    for (std::size_t T : {100, 400, 1600}) {
        double mean = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            RunConfig rc = base_run(b, Algorithm::norm_prr, Schedule::theory_constant(eta, T, p.n), T, seed);
            rc.diagnostics.variance = false;
            const Trace t = run(rc);
            double best = t.initial.fnor_norm * t.initial.fnor_norm;
            // z^1 .. z^T: record k holds z^{k+1}
            for (std::size_t k = 0; k + 1 < t.records.size(); ++k)
                best = std::min(best, t.records[k].at_end.fnor_norm * t.records[k].at_end.fnor_norm);
            mean += best / 10.0;
        }
        Ts.push_back(double(T));
        ys.push_back(mean);
        detail += "T=" + std::to_string(T) + ": " + fmt("%.3g", mean) + "  ";
    }
    double slope = 0.0;
    {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            mx += std::log(Ts[i]) / 3.0;
            my += std::log(ys[i]) / 3.0;
        }
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            sxx += (std::log(Ts[i]) - mx) * (std::log(Ts[i]) - mx);
            sxy += (std::log(Ts[i]) - mx) * (std::log(ys[i]) - my);
        }
        slope = sxy / sxx;
    }
    return {slope >= -1.0 && slope <= -0.4, detail + "log-log slope " + fmt("%.3f", slope) + " (eta = " + fmt("%.3g", eta) + ")"};
}

// 9. tail rates under a 1/k schedule
Outcome kl_rate() {
    const BenchmarkBundle b = make_quadratic_l1(32, 8, 10.0, 0.01, 1);
    const auto& known = b.known_solution();
    const double mu = known->mu.value();
    const double L = b.schedule_L;
    const std::size_t epochs = 5000;
    auto attempt = [&](double alpha) {
        // eta_k = alpha / (beta + k) with beta keeping eta_1 <= 1/L
        const double beta = std::max(2.0 / mu, alpha * L);
        std::vector<double> dist_slopes, psi_slopes;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            RunConfig rc = base_run(b, Algorithm::norm_prr, Schedule::polynomial(alpha, beta, 1.0, 32, true), epochs, seed);
            rc.reference = known->w;
            rc.diagnostics = {false, false, false};
            const Trace t = run(rc);
            std::vector<double> k, dist, gap;
            for (const auto& rec : t.records) {
                k.push_back(double(rec.epoch));
                dist.push_back(rec.at_end.ref_dist);
                gap.push_back(std::fabs(rec.at_end.psi - *known->psi));
            }
            dist_slopes.push_back(fit_rate(k, dist, 0.5));
            psi_slopes.push_back(fit_rate(k, gap, 0.5));
        }
        return std::pair{median(dist_slopes), median(psi_slopes)};
    };
    double alpha = 2.0 / mu;
    auto [ds, ps] = attempt(alpha);
    std::string detail = "alpha = " + fmt("%.3g", alpha) + ": distance slope " + fmt("%.3f", ds) + ", psi-gap slope " + fmt("%.3f", ps);
    if (!(ds <= -0.8 && ps <= -1.6)) {
        alpha *= 2.0;
        std::tie(ds, ps) = attempt(alpha);
        detail += "; rerun with alpha = " + fmt("%.3g", alpha) + ": " + fmt("%.3f", ds) + ", " + fmt("%.3f", ps);
    }
    return {ds <= -0.8 && ps <= -1.6, detail + " (median of 5 seeds, last 2500 of 5000 epochs)"};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string drop_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string out, line;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

// 10. repeated compare runs produce identical CSVs
Outcome determinism(const std::string& cli) {
    const auto dir = std::filesystem::temp_directory_path() / "nprr_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "compare.cfg";
    {
        std::ofstream out(cfg);
        out << "problem = quadratic-l1\nalgorithms = norm-prr, e-prr, psgd\n"
               "schedules = const alpha=1/L, poly alpha=1/L beta=1 gamma=0.7 per_n=1\n"
               "epochs = 50\nseeds = 1..5\n";
    }
    std::string a, b, agg_a, agg_b;
    if (!cli.empty()) {
        for (const char* name : {"a", "b"}) {
            const std::string cmd = "\"" + cli + "\" compare \"" + cfg.string() + "\" --no-plots --jobs 2 --output \"" +
                                    (dir / name).string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) return {false, "compare command failed: " + cmd};
        }
        a = read_file(dir / "a" / "runs.csv");
        b = read_file(dir / "b" / "runs.csv");
        agg_a = read_file(dir / "a" / "aggregate.csv");
        agg_b = read_file(dir / "b" / "aggregate.csv");
    } else {
        ExperimentConfig c = load_config(cfg.string());
        ExecuteOptions opt;
        opt.write_files = false;
        a = execute(c, opt).csv_text;
        b = execute(c, opt).csv_text;
    }
    std::filesystem::remove_all(dir);
    const bool same = !a.empty() && drop_last_column(a) == drop_last_column(b) && agg_a == agg_b;
    return {same, std::string(cli.empty() ? "execute()" : "nprr compare") + " twice: " +
                      std::to_string(std::count(a.begin(), a.end(), '\n')) + " CSV lines, " +
                      (same ? "identical" : "DIFFERENT") + " apart from elapsed_ms"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    set_warning_sink([](const std::string&) {});
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria = {
        {1, "prox oracle equivalence", 10, prox_equivalence},
        {2, "gradient checks", 5, gradient_checks},
        {3, "algebraic reductions", 5, reductions},
        {4, "inequality suite", 120, inequality_suite},
        {5, "sampling law", 30, sampling_law},
        {6, "feasibility on the toy problem", 30, feasibility},
        {7, "interpolation linear rate", 120, interpolation},
        {8, "complexity trend", 180, complexity_trend},
        {9, "1/k tail rates", 120, kl_rate},
        {10, "harness determinism", 30, [&] { return determinism(cli); }},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %2d %-32s %s  [%.2fs / %.0fs%s]  %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs, c.budget_s,
                    in_time ? "" : " OVER BUDGET", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
