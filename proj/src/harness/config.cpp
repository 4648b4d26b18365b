#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "nprr/harness.hpp"

namespace nprr {

double LScaled::resolve(double L) const {
    if (l_power == 0) return value;
    if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("L-relative value '" + text() + "' needs a finite L");
    return l_power > 0 ? value * L : value / L;
}

std::string LScaled::text() const {
    std::ostringstream os;
    os.precision(17);
    os << value;
    if (l_power > 0) os << "L";
    if (l_power < 0) os << "/L";
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_double(const std::string& text, const std::string& key, std::size_t line) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
        throw ParseError(line, "key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

std::uint64_t to_uint(const std::string& text, const std::string& key, std::size_t line) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(line, "key '" + key + "': expected a non-negative integer, got '" + text + "'");
    errno = 0;
    const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ParseError(line, "key '" + key + "': integer out of range");
    return v;
}

LScaled to_lscaled(const std::string& text, const std::string& key, std::size_t line) {
    LScaled v;
    std::string num = text;
    if (num.size() >= 2 && num.compare(num.size() - 2, 2, "/L") == 0) {
        v.l_power = -1;
        num.resize(num.size() - 2);
    } else if (!num.empty() && num.back() == 'L') {
        v.l_power = 1;
        num.pop_back();
        if (num.empty()) num = "1";
    }
    v.value = to_double(num, key, line);
    return v;
}

ScheduleSpec parse_schedule_at(const std::string& text, std::size_t line) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    ScheduleSpec s;
    s.text = trim(text);
    if (kind == "poly" || kind == "polynomial")
        s.kind = ScheduleKind::polynomial;
    else if (kind == "const" || kind == "constant")
        s.kind = ScheduleKind::constant;
    else if (kind == "theory")
        s.kind = ScheduleKind::theory_constant;
    else
        throw ParseError(line, "key 'schedule': unknown schedule kind '" + kind + "'");

    std::set<std::string> seen;
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError(line, "key 'schedule': expected name=value, got '" + tok + "'");
        const std::string name = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        const std::string key = "schedule." + name;
        if (!seen.insert(name).second) throw ParseError(line, "duplicate key '" + key + "'");
        const bool poly = s.kind == ScheduleKind::polynomial;
        const bool theory = s.kind == ScheduleKind::theory_constant;
        if (name == "alpha" && !theory)
            s.alpha = to_lscaled(value, key, line);
        else if (name == "beta" && poly)
            s.beta = to_lscaled(value, key, line);
        else if (name == "gamma" && poly)
            s.gamma = to_double(value, key, line);
        else if (name == "per_n" && poly)
            s.per_n = to_uint(value, key, line) != 0;
        else if (name == "T" && theory)
            s.horizon = to_uint(value, key, line);
        else if (name == "eta" && theory)
            s.eta = to_double(value, key, line);
        else
            throw ParseError(line, "unknown key '" + key + "' for " + kind + " schedules");
    }
    if (s.kind == ScheduleKind::polynomial && !(s.gamma > 1.0 / 3.0 && s.gamma <= 1.0))
        throw ParseError(line, "key 'schedule.gamma': must lie in (1/3, 1]");
    if (s.kind != ScheduleKind::theory_constant && !(s.alpha.value > 0.0))
        throw ParseError(line, "key 'schedule.alpha': must be > 0");
    if (s.kind == ScheduleKind::polynomial && !(s.beta.value >= 0.0))
        throw ParseError(line, "key 'schedule.beta': must be >= 0");
    if (s.kind == ScheduleKind::theory_constant) {
        if (s.horizon == 0) throw ParseError(line, "key 'schedule.T': theory schedules need T >= 1");
        if (s.eta && !(*s.eta > 0.0)) throw ParseError(line, "key 'schedule.eta': must be > 0");
    }
    return s;
}

const std::map<std::string, std::set<std::string>>& problem_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"toy1d", {}},
        {"simplex", {"n", "d", "support", "dist", "data_seed"}},
        {"tanh", {"n", "d", "data_seed", "nu", "data"}},
        {"quadratic-l1", {"n", "d", "kappa", "nu", "data_seed"}},
        {"quadratic-mcp", {"n", "d", "kappa", "nu", "gamma", "data_seed"}},
    };
    return keys;
}

std::string param(const ExperimentConfig& cfg, const std::string& key, const std::string& fallback) {
    const auto it = cfg.problem_params.find(key);
    return it == cfg.problem_params.end() ? fallback : it->second;
}

std::size_t param_size(const ExperimentConfig& cfg, const std::string& key, std::size_t fallback) {
    const auto it = cfg.problem_params.find(key);
    return it == cfg.problem_params.end() ? fallback : static_cast<std::size_t>(to_uint(it->second, key, 0));
}

double param_double(const ExperimentConfig& cfg, const std::string& key, double fallback) {
    const auto it = cfg.problem_params.find(key);
    return it == cfg.problem_params.end() ? fallback : to_double(it->second, key, 0);
}

}  // namespace

ScheduleSpec parse_schedule(const std::string& text) { return parse_schedule_at(text, 1); }

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, std::size_t> top_seen;
    std::map<std::string, std::size_t> problem_lines;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    std::size_t lineno = 0;
    static const std::set<std::string> top_keys = {"problem", "algorithms", "lambda", "schedule", "schedules", "epochs",
                                                   "seeds", "output", "rel_err", "shuffle", "diagnostics",
                                                   "metric_lambda"};
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(lineno, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "problem") throw ParseError(lineno, "unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (value.empty()) throw ParseError(lineno, "key '" + key + "' has no value");

        if (section == "problem") {
            if (!problem_lines.emplace(key, lineno).second) throw ParseError(lineno, "duplicate key 'problem." + key + "'");
            cfg.problem_params[key] = value;
            continue;
        }
        if (!top_keys.count(key)) throw ParseError(lineno, "unknown key '" + key + "'");
        if (key == "schedules") key = "schedule";
        if (!top_seen.emplace(key, lineno).second) throw ParseError(lineno, "duplicate key '" + key + "'");

        if (key == "problem") {
            if (!problem_keys().count(value)) throw ParseError(lineno, "key 'problem': unknown problem '" + value + "'");
            cfg.problem = value;
        } else if (key == "algorithms") {
            for (const auto& tag : split(value, ',')) {
                try {
                    cfg.algorithms.push_back(parse_algorithm(tag));
                } catch (const ParameterError&) {
                    throw ParseError(lineno, "key 'algorithms': unknown algorithm '" + tag + "'");
                }
            }
        } else if (key == "lambda") {
            cfg.lambda = to_double(value, key, lineno);
            if (!(*cfg.lambda > 0.0)) throw ParseError(lineno, "key 'lambda': must be > 0");
        } else if (key == "schedule") {
            for (const auto& s : split(value, ',')) cfg.schedules.push_back(parse_schedule_at(s, lineno));
        } else if (key == "epochs") {
            cfg.epochs = static_cast<std::size_t>(to_uint(value, key, lineno));
            if (cfg.epochs == 0) throw ParseError(lineno, "key 'epochs': must be >= 1");
        } else if (key == "seeds") {
            for (const auto& item : split(value, ',')) {
                const auto dots = item.find("..");
                if (dots == std::string::npos) {
                    cfg.seeds.push_back(to_uint(item, key, lineno));
                    continue;
                }
                const auto lo = to_uint(trim(item.substr(0, dots)), key, lineno);
                const auto hi = to_uint(trim(item.substr(dots + 2)), key, lineno);
                if (hi < lo || hi - lo > 100000) throw ParseError(lineno, "key 'seeds': bad range '" + item + "'");
                for (auto s = lo; s <= hi; ++s) cfg.seeds.push_back(s);
            }
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "rel_err") {
            if (value == "pooled-min")
                cfg.rel_err = RelErrConvention::pooled_min;
            else if (value == "reference" || value == "reference-psi-star")
                cfg.rel_err = RelErrConvention::reference;
            else
                throw ParseError(lineno, "key 'rel_err': expected pooled-min or reference");
        } else if (key == "shuffle") {
            try {
                cfg.shuffle = parse_shuffle_mode(value);
            } catch (const ParameterError&) {
                throw ParseError(lineno, "key 'shuffle': unknown mode '" + value + "'");
            }
        } else if (key == "diagnostics") {
            cfg.diagnostics = {false, false, false};
            for (const auto& item : split(value, ',')) {
                if (item == "all")
                    cfg.diagnostics = {true, true, true};
                else if (item == "none")
                    cfg.diagnostics = {false, false, false};
                else if (item == "error")
                    cfg.diagnostics.error = true;
                else if (item == "merit")
                    cfg.diagnostics.merit = true;
                else if (item == "variance")
                    cfg.diagnostics.variance = true;
                else
                    throw ParseError(lineno, "key 'diagnostics': unknown toggle '" + item + "'");
            }
        } else if (key == "metric_lambda") {
            cfg.metric_lambda = to_double(value, key, lineno);
            if (!(cfg.metric_lambda > 0.0)) throw ParseError(lineno, "key 'metric_lambda': must be > 0");
        }
    }
    for (const char* required : {"problem", "algorithms", "schedule", "epochs", "seeds"})
        if (!top_seen.count(required)) throw ParseError(lineno, std::string("missing required key '") + required + "'");
    if (cfg.algorithms.empty()) throw ParseError(top_seen["algorithms"], "key 'algorithms': list is empty");
    if (cfg.schedules.empty()) throw ParseError(top_seen["schedule"], "key 'schedule': list is empty");
    if (cfg.seeds.empty()) throw ParseError(top_seen["seeds"], "key 'seeds': list is empty");
    const auto& allowed = problem_keys().at(cfg.problem);
    for (const auto& [key, line] : problem_lines)
        if (!allowed.count(key)) throw ParseError(line, "unknown key 'problem." + key + "' for problem " + cfg.problem);
    // type-check problem parameters early so bad values fail as config errors
    for (const auto& [key, value] : cfg.problem_params) {
        const std::size_t line = problem_lines[key];
        if (key == "dist") {
            if (value != "uniform" && value != "student-t") throw ParseError(line, "key 'problem.dist': expected uniform or student-t");
        } else if (key == "data") {
            continue;
        } else if (key == "nu" || key == "kappa" || key == "gamma") {
            to_double(value, "problem." + key, line);
        } else {
            to_uint(value, "problem." + key, line);
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

BenchmarkBundle build_problem(const ExperimentConfig& cfg) {
    const std::uint64_t data_seed = param_size(cfg, "data_seed", 1);
    if (cfg.problem == "toy1d") return make_toy_1d();
    if (cfg.problem == "simplex")
        return make_simplex_interpolation(param_size(cfg, "n", 500), param_size(cfg, "d", 50), param_size(cfg, "support", 5),
                                          parse_sample_dist(param(cfg, "dist", "uniform")), data_seed);
    if (cfg.problem == "tanh") {
        const double nu = param_double(cfg, "nu", 0.01);
        const std::string path = param(cfg, "data", "");
        const Dataset data = path.empty()
                                 ? make_gaussian_classification(param_size(cfg, "n", 64), param_size(cfg, "d", 10), data_seed)
                                 : load_libsvm(path);
        return make_tanh_classification(data, nu);
    }
    if (cfg.problem == "quadratic-l1")
        return make_quadratic_l1(param_size(cfg, "n", 32), param_size(cfg, "d", 8), param_double(cfg, "kappa", 10.0),
                                 param_double(cfg, "nu", 0.01), data_seed);
    if (cfg.problem == "quadratic-mcp")
        return make_quadratic_mcp(param_size(cfg, "n", 32), param_size(cfg, "d", 8), param_double(cfg, "kappa", 10.0),
                                  param_double(cfg, "nu", 0.01), param_double(cfg, "gamma", 4.0), data_seed);
    throw ParameterError("unknown problem '" + cfg.problem + "'");
}

Schedule resolve_schedule(const ScheduleSpec& spec, const BenchmarkBundle& bundle, double lambda) {
    const std::size_t n = bundle.problem().n;
    const double L = bundle.schedule_L;
    Schedule s;
    switch (spec.kind) {
        case ScheduleKind::constant: s = Schedule::constant(spec.alpha.resolve(L), n); break;
        case ScheduleKind::polynomial:
            s = Schedule::polynomial(spec.alpha.resolve(L), spec.beta.resolve(L), spec.gamma, n, spec.per_n);
            break;
        case ScheduleKind::theory_constant: {
            const TheoryConstants c =
                theory_constants(bundle.problem().lipschitz, bundle.objective->regularizer.rho(), lambda);
            const double eta = spec.eta ? *spec.eta : theory_eta_bound(c, n, spec.horizon);
            s = Schedule::theory_constant(eta, spec.horizon, n);
            break;
        }
    }
    validate(s);
    return s;
}

}  // namespace nprr
