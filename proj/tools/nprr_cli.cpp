#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "nprr/benchmarks.hpp"
#include "nprr/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kDiagnosticsViolation = 3;

struct Flags {
    std::size_t jobs = 1;
    std::string output;
    std::uint64_t seed_offset = 0;
    bool no_plots = false;
};

std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw nprr::ParseError(1, "expected name=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        if (!out.emplace(key, item.substr(eq + 1)).second) throw nprr::ParseError(1, "duplicate key '" + key + "'");
    }
    return out;
}

std::uint64_t get_uint(const std::map<std::string, std::string>& p, const std::string& key, std::uint64_t fallback) {
    const auto it = p.find(key);
    if (it == p.end()) return fallback;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw nprr::ParseError(1, "key '" + key + "': expected an integer");
    }
}

nprr::ExperimentConfig load(const std::string& path, const Flags& flags) {
    nprr::ExperimentConfig cfg = nprr::load_config(path);
    if (!flags.output.empty()) cfg.output = flags.output;
    return cfg;
}

nprr::ExecuteOptions options(const Flags& flags, bool check) {
    nprr::ExecuteOptions o;
    o.jobs = flags.jobs;
    o.seed_offset = flags.seed_offset;
    o.check_diagnostics = check;
    return o;
}

void print_groups(const nprr::ExecuteResult& r) {
    for (const auto& g : r.groups)
        std::cout << nprr::to_string(g.algorithm) << " [" << g.schedule_id << "]: success " << g.completed << '/' << g.runs
                  << " (infeasible " << g.failed_infeasible << ", diverged " << g.diverged << ")\n";
    std::cout << "csv: " << r.csv_path << "\nsummary: " << r.summary_path << '\n';
}

int cmd_run(const std::string& path, const Flags& flags) {
    const auto cfg = load(path, flags);
    const auto r = nprr::execute(cfg, options(flags, false));
    print_groups(r);
    return kOk;
}

int cmd_compare(const std::string& path, const Flags& flags) {
    const auto cfg = load(path, flags);
    const auto r = nprr::execute(cfg, options(flags, false));
    const auto curves = nprr::aggregate_csv_text({r.csv_text});
    const std::filesystem::path dir(cfg.output);
    {
        std::ofstream out(dir / "aggregate.csv", std::ios::binary);
        if (!out) throw nprr::Error("cannot write aggregate.csv");
        out << nprr::format_aggregate(curves);
    }
    if (!flags.no_plots) {
        for (const char* metric : {"rel_err", "nat_res"}) {
            const auto file = dir / (std::string("compare_") + metric + ".svg");
            if (nprr::emit_plot(curves, metric, file.string())) std::cout << "plot: " << file.string() << '\n';
        }
    }
    print_groups(r);
    std::cout << "aggregate: " << (dir / "aggregate.csv").string() << '\n';
    return kOk;
}

int cmd_check(const std::string& path, const Flags& flags) {
    const auto cfg = load(path, flags);
    const auto r = nprr::execute(cfg, options(flags, true));
    for (const auto& run : r.runs)
        for (const auto& rep : run.reports)
            std::cout << "run " << run.run_id << " (" << nprr::to_string(run.algorithm) << ", seed " << run.seed
                      << "): " << nprr::format_report(rep) << '\n';
    print_groups(r);
    if (r.diagnostics_violated) {
        std::cout << "diagnostics: VIOLATED\n";
        return kDiagnosticsViolation;
    }
    std::cout << "diagnostics: ok\n";
    return kOk;
}

int cmd_gen_data(const std::string& kind, const std::string& params, const std::string& out) {
    const auto p = parse_params(params);
    const std::uint64_t seed = get_uint(p, "seed", 1);
    for (const auto& [key, value] : p)
        if (key != "n" && key != "d" && key != "seed")
            throw nprr::ParseError(1, "unknown key '" + key + "'");
    if (kind == "gaussian") {
        const auto data = nprr::make_gaussian_classification(get_uint(p, "n", 64), get_uint(p, "d", 10), seed);
        nprr::save_synthetic(out, data, seed, "gaussian");
    } else {
        throw nprr::ParameterError("unknown data kind '" + kind + "' (expected gaussian)");
    }
    std::cout << "wrote " << out << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normal-map proximal random reshuffling experiments"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--jobs", flags.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    app.add_option("--output", flags.output, "Output directory (overrides the config)");
    app.add_option("--seed-offset", flags.seed_offset, "Added to every configured seed");
    app.add_flag("--no-plots", flags.no_plots, "Skip SVG plots");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the configured grid");
    run->add_option("config", config_path, "Config file")->required();
    auto* compare = app.add_subcommand("compare", "Run, aggregate and plot");
    compare->add_option("config", config_path, "Config file")->required();
    auto* check = app.add_subcommand("check", "Run and verify the descent inequalities");
    check->add_option("config", config_path, "Config file")->required();
    std::string kind, params, out;
    auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset");
    gen->add_option("kind", kind, "Data kind (gaussian)")->required();
    gen->add_option("params", params, "Comma-separated name=value list")->required();
    gen->add_option("out", out, "Output path")->required();
    for (auto* sub : {run, compare, check, gen}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(config_path, flags);
        if (*compare) return cmd_compare(config_path, flags);
        if (*check) return cmd_check(config_path, flags);
        if (*gen) return cmd_gen_data(kind, params, out);
    } catch (const nprr::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const nprr::ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kRuntimeError;
}
