#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nprr/benchmarks.hpp"
#include "nprr/diagnostics.hpp"
#include "nprr/solvers.hpp"

namespace nprr {

/// Number that may be expressed relative to the benchmark's schedule L:
/// "0.5", "4/L" (value / L) or "2L" (value * L).
struct LScaled {
    double value = 0.0;
    int l_power = 0;  // -1, 0 or +1
    double resolve(double L) const;
    std::string text() const;
};

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::constant;
    LScaled alpha{1.0, 0};
    LScaled beta{0.0, 0};
    double gamma = 1.0;
    std::size_t horizon = 0;
    std::optional<double> eta;  // theory: defaults to the admissible bound
    bool per_n = false;
    std::string text;  // as written in the config
};

enum class RelErrConvention { pooled_min, reference };

struct ExperimentConfig {
    std::string problem;  // toy1d | simplex | tanh | quadratic-l1 | quadratic-mcp
    std::map<std::string, std::string> problem_params;
    std::vector<Algorithm> algorithms;
    std::optional<double> lambda;
    std::vector<ScheduleSpec> schedules;
    std::size_t epochs = 0;
    std::vector<std::uint64_t> seeds;
    std::string output = "results";
    RelErrConvention rel_err = RelErrConvention::pooled_min;
    ShuffleMode shuffle = ShuffleMode::independent;
    Diagnostics diagnostics;
    double metric_lambda = 1.0;
};

/// Parses the flat "key = value" format; '#' starts a comment; a
/// "[problem]" section holds benchmark parameters. Throws ParseError naming
/// the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

ScheduleSpec parse_schedule(const std::string& text);

/// Builds the configured benchmark (data seeds come from [problem]).
BenchmarkBundle build_problem(const ExperimentConfig& cfg);

/// Concrete schedule for a bundle (L-relative values resolved).
Schedule resolve_schedule(const ScheduleSpec& spec, const BenchmarkBundle& bundle, double lambda);

struct RunSummary {
    std::size_t run_id = 0;
    Algorithm algorithm = Algorithm::norm_prr;
    std::string schedule_id;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::completed;
    std::optional<std::size_t> failure_epoch;
    double final_psi = std::numeric_limits<double>::quiet_NaN();
    double final_nat_res = std::numeric_limits<double>::quiet_NaN();
    double min_nat_res = std::numeric_limits<double>::quiet_NaN();
    std::vector<InequalityReport> reports;
};

struct GroupSummary {
    Algorithm algorithm = Algorithm::norm_prr;
    std::string schedule_id;
    std::size_t runs = 0;
    std::size_t completed = 0;
    std::size_t failed_infeasible = 0;
    std::size_t diverged = 0;
    double success_rate() const { return runs == 0 ? 0.0 : static_cast<double>(completed) / static_cast<double>(runs); }
};

struct ExecuteOptions {
    std::size_t jobs = 1;
    std::uint64_t seed_offset = 0;
    bool check_diagnostics = false;
    bool write_files = true;
};

struct ExecuteResult {
    std::string csv_path;
    std::string summary_path;
    std::string csv_text;
    std::vector<RunSummary> runs;
    std::vector<GroupSummary> groups;
    double psi_min = std::numeric_limits<double>::quiet_NaN();
    bool diagnostics_violated = false;
};

/// Runs the (algorithm, schedule, seed) grid. Run-level failures are
/// recorded, never thrown.
ExecuteResult execute(const ExperimentConfig& cfg, const ExecuteOptions& options = {});

/// CSV header of execute's per-epoch rows.
const std::vector<std::string>& csv_columns();

struct Curve {
    Algorithm algorithm = Algorithm::norm_prr;
    std::string schedule_id;
    std::size_t runs = 0;
    std::size_t completed = 0;
    std::vector<double> epochs;
    std::map<std::string, std::vector<double>> mean;    // metric -> per-epoch mean
    std::map<std::string, std::vector<double>> median;  // metric -> per-epoch median
    double success_rate() const { return runs == 0 ? 0.0 : static_cast<double>(completed) / static_cast<double>(runs); }
};

/// Mean and median per (algorithm, schedule, epoch) over completed runs.
/// Groups whose runs all failed keep an empty curve.
std::vector<Curve> aggregate_csv_text(const std::vector<std::string>& csv_texts);
std::vector<Curve> aggregate(const std::vector<std::string>& csv_paths);
std::string format_aggregate(const std::vector<Curve>& curves);

/// Log-scale SVG, one polyline per group. Returns false (with a warning and
/// no file) when there is nothing to draw.
bool emit_plot(const std::vector<Curve>& curves, const std::string& metric, const std::string& path);
std::string render_plot(const std::vector<Curve>& curves, const std::string& metric);

/// "%.17g", empty for NaN.
std::string format_number(double v);

}  // namespace nprr
