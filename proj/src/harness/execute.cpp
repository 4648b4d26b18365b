#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "nprr/harness.hpp"

namespace nprr {

std::string format_number(double v) {
    if (std::isnan(v)) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {"run_id", "algorithm", "schedule_id", "seed",   "epoch",
                                                  "step_size", "psi",     "rel_err",     "nat_res", "fnor_norm",
                                                  "merit",  "sigma2",    "err_norm",    "feasible", "elapsed_ms"};
    return cols;
}

namespace {

struct Job {
    Algorithm algorithm;
    std::size_t schedule_index;
    std::uint64_t seed;
};

double rel_err(double psi, double psi_min) {
    if (std::isnan(psi)) return psi;
    return (psi - psi_min) / std::max(1.0, psi_min);
}

std::vector<InequalityReport> diagnose(const Trace& t, const BenchmarkBundle& bundle) {
    std::vector<InequalityReport> reports;
    const ProblemInstance& p = bundle.problem();
    const double rho = bundle.objective->regularizer.rho();
    reports.push_back(check_variance_along(t, p));
    if (t.algorithm != Algorithm::norm_prr) return reports;
    reports.push_back(check_stat_along(t, rho));
    try {
        const TheoryConstants c = theory_constants(p.lipschitz, rho, t.lambda);
        reports.push_back(check_error_bound(t, c));
        reports.push_back(check_merit_descent(t, c));
        reports.push_back(check_complexity_bound(t, c, bundle.objective->psi_lb()));
    } catch (const ParameterError& e) {
        for (const char* name : {"error-bound", "merit-descent", "complexity-bound"}) {
            InequalityReport r;
            r.name = name;
            r.applicable = false;
            r.reason = e.what();
            reports.push_back(r);
        }
    }
    return reports;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

ExecuteResult execute(const ExperimentConfig& cfg, const ExecuteOptions& options) {
    if (cfg.algorithms.empty() || cfg.schedules.empty() || cfg.seeds.empty() || cfg.epochs == 0)
        throw ParameterError("config needs at least one algorithm, schedule and seed and epochs >= 1");
    const BenchmarkBundle bundle = build_problem(cfg);
    const double lambda = cfg.lambda.value_or(bundle.lambda);
    std::vector<Schedule> schedules;
    for (const auto& spec : cfg.schedules) schedules.push_back(resolve_schedule(spec, bundle, lambda));

    std::vector<Job> jobs;
    for (Algorithm a : cfg.algorithms)
        for (std::size_t s = 0; s < schedules.size(); ++s)
            for (std::uint64_t seed : cfg.seeds) jobs.push_back({a, s, seed + options.seed_offset});

    auto config_for = [&](const Job& job) {
        RunConfig rc;
        rc.algorithm = job.algorithm;
        rc.objective = bundle.objective;
        rc.lambda = lambda;
        rc.schedule = schedules[job.schedule_index];
        rc.epochs = cfg.epochs;
        rc.seed = job.seed;
        rc.shuffle = cfg.shuffle;
        rc.diagnostics = cfg.diagnostics;
        rc.domain_guard = bundle.domain_guard;
        rc.w_start = bundle.w_start;
        rc.metric_lambda = cfg.metric_lambda;
        return rc;
    };

    for (Algorithm a : cfg.algorithms)
        if (a == Algorithm::rr && bundle.objective->regularizer.kind() != RegularizerKind::zero)
            throw ParameterError("algorithm rr needs a problem without regularizer");

    std::vector<Trace> traces(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            try {
                traces[j] = run(config_for(jobs[j]));
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(options.jobs, jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    ExecuteResult result;
    double psi_min = std::numeric_limits<double>::infinity();
    if (cfg.rel_err == RelErrConvention::reference) {
        const auto& known = bundle.known_solution();
        if (!known || !known->psi) throw ParameterError("rel_err = reference needs a problem with a known solution");
        psi_min = *known->psi;
    } else {
        for (const Trace& t : traces) {
            if (std::isfinite(t.initial.psi)) psi_min = std::min(psi_min, t.initial.psi);
            for (const auto& rec : t.records)
                if (rec.feasible && std::isfinite(rec.at_end.psi)) psi_min = std::min(psi_min, rec.at_end.psi);
        }
    }
    result.psi_min = psi_min;

    std::ostringstream csv;
    for (std::size_t c = 0; c < csv_columns().size(); ++c) csv << (c ? "," : "") << csv_columns()[c];
    csv << '\n';
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const Trace& t = traces[j];
        const std::string& sid = cfg.schedules[jobs[j].schedule_index].text;
        RunSummary rs;
        rs.run_id = j;
        rs.algorithm = jobs[j].algorithm;
        rs.schedule_id = sid;
        rs.seed = jobs[j].seed;
        rs.status = t.status;
        rs.failure_epoch = t.failure_epoch;
        rs.final_psi = t.initial.psi;
        rs.final_nat_res = t.initial.nat_res;
        rs.min_nat_res = t.initial.nat_res;
        for (const auto& rec : t.records) {
            const PointMetrics& m = rec.at_end;
            csv << j << ',' << to_string(jobs[j].algorithm) << ',' << sid << ',' << jobs[j].seed << ',' << rec.epoch << ','
                << format_number(rec.step_size) << ',' << format_number(m.psi) << ','
                << format_number(rel_err(m.psi, psi_min)) << ',' << format_number(m.nat_res) << ','
                << format_number(m.fnor_norm) << ',' << format_number(m.merit) << ',' << format_number(m.sigma2) << ','
                << format_number(rec.err_norm) << ',' << (rec.feasible ? 1 : 0) << ','
                << format_number(rec.elapsed_ms) << '\n';
            if (rec.feasible) {
                rs.final_psi = m.psi;
                rs.final_nat_res = m.nat_res;
                if (!(m.nat_res >= rs.min_nat_res)) rs.min_nat_res = m.nat_res;
            }
        }
        if (options.check_diagnostics) {
            rs.reports = diagnose(t, bundle);
            for (const auto& r : rs.reports)
                if (r.applicable && !r.holds) result.diagnostics_violated = true;
        }
        result.runs.push_back(std::move(rs));
    }
    result.csv_text = csv.str();

    for (const RunSummary& rs : result.runs) {
        auto it = std::find_if(result.groups.begin(), result.groups.end(), [&](const GroupSummary& g) {
            return g.algorithm == rs.algorithm && g.schedule_id == rs.schedule_id;
        });
        if (it == result.groups.end()) {
            result.groups.push_back({rs.algorithm, rs.schedule_id});
            it = std::prev(result.groups.end());
        }
        ++it->runs;
        if (rs.status == RunStatus::completed) ++it->completed;
        if (rs.status == RunStatus::failed_infeasible) ++it->failed_infeasible;
        if (rs.status == RunStatus::diverged) ++it->diverged;
    }

    if (options.write_files) {
        const std::filesystem::path dir(cfg.output);
        std::filesystem::create_directories(dir);
        result.csv_path = (dir / "runs.csv").string();
        result.summary_path = (dir / "summary.txt").string();
        write_text(result.csv_path, result.csv_text);

        std::ostringstream sum;
        std::size_t completed = 0, infeasible = 0, diverged = 0;
        for (const auto& rs : result.runs) {
            completed += rs.status == RunStatus::completed;
            infeasible += rs.status == RunStatus::failed_infeasible;
            diverged += rs.status == RunStatus::diverged;
        }
        sum << "problem = " << bundle.name << '\n'
            << "n = " << bundle.problem().n << '\n'
            << "dim = " << bundle.problem().dim << '\n'
            << "regularizer = " << bundle.objective->regularizer.describe() << '\n'
            << "lambda = " << format_number(lambda) << '\n'
            << "epochs = " << cfg.epochs << '\n'
            << "rel_err_convention = " << (cfg.rel_err == RelErrConvention::pooled_min ? "pooled-min" : "reference") << '\n'
            << "psi_min = " << format_number(psi_min) << '\n'
            << "runs = " << result.runs.size() << '\n'
            << "completed = " << completed << '\n'
            << "failed_infeasible = " << infeasible << '\n'
            << "diverged = " << diverged << '\n';
        for (std::size_t s = 0; s < schedules.size(); ++s)
            sum << "schedule." << s << " = " << cfg.schedules[s].text << " (" << schedules[s].describe() << ")\n";
        for (std::size_t g = 0; g < result.groups.size(); ++g) {
            const auto& gr = result.groups[g];
            sum << "group." << g << ".algorithm = " << to_string(gr.algorithm) << '\n'
                << "group." << g << ".schedule = " << gr.schedule_id << '\n'
                << "group." << g << ".runs = " << gr.runs << '\n'
                << "group." << g << ".success_rate = " << format_number(gr.success_rate()) << '\n';
        }
        for (const auto& rs : result.runs) {
            const std::string p = "run." + std::to_string(rs.run_id) + ".";
            sum << p << "algorithm = " << to_string(rs.algorithm) << '\n'
                << p << "schedule = " << rs.schedule_id << '\n'
                << p << "seed = " << rs.seed << '\n'
                << p << "status = " << to_string(rs.status) << '\n'
                << p << "failure_epoch = " << (rs.failure_epoch ? std::to_string(*rs.failure_epoch) : "") << '\n'
                << p << "final_psi = " << format_number(rs.final_psi) << '\n'
                << p << "final_nat_res = " << format_number(rs.final_nat_res) << '\n'
                << p << "min_nat_res = " << format_number(rs.min_nat_res) << '\n';
            for (const auto& r : rs.reports)
                sum << p << "check." << r.name << " = "
                    << (!r.applicable ? "not-applicable" : r.holds ? "holds" : "violated") << '\n';
        }
        write_text(result.summary_path, sum.str());
    }
    return result;
}

}  // namespace nprr
