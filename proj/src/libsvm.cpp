#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nprr/benchmarks.hpp"
#include "nprr/kernels.hpp"

namespace nprr {

void Dataset::add_row(const std::vector<std::pair<std::size_t, double>>& entries, double label) {
    for (std::size_t k = 1; k < entries.size(); ++k)
        if (entries[k].first <= entries[k - 1].first) throw DataError("row entries must have ascending column indices");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        cols.push_back(entries[k].first);
        vals.push_back(entries[k].second);
        d = std::max(d, entries[k].first + 1);
    }
    row_ptr.push_back(cols.size());
    labels.push_back(label);
    ++n;
}

Dataset Dataset::from_dense(const std::vector<Vector>& rows, const Vector& labels) {
    if (rows.size() != labels.size()) throw DataError("row count and label count differ");
    Dataset data;
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw DataError("dense rows must share one length");
        std::vector<std::pair<std::size_t, double>> entries;
        for (std::size_t j = 0; j < d; ++j)
            if (rows[i][j] != 0.0) entries.emplace_back(j, rows[i][j]);
        data.add_row(entries, labels[i]);
    }
    data.d = d;
    data.validate();
    return data;
}

double Dataset::row_dot(std::size_t i, VecView w) const {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * w[cols[k]];
    return s;
}

void Dataset::row_axpy(std::size_t i, double a, VecMut out) const {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) out[cols[k]] += a * vals[k];
}

double Dataset::row_sq_norm(std::size_t i) const {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * vals[k];
    return s;
}

Vector Dataset::dense_row(std::size_t i) const {
    Vector row(d, 0.0);
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) row[cols[k]] = vals[k];
    return row;
}

void Dataset::validate() const {
    if (labels.size() != n || row_ptr.size() != n + 1) throw DataError("row count and label count differ");
    if (cols.size() != vals.size() || row_ptr.back() != cols.size()) throw DataError("inconsistent sparse layout");
    for (std::size_t c : cols)
        if (c >= d) throw DataError("column index exceeds dimension");
    if (!all_finite(vals) || !all_finite(labels)) throw DataError("dataset contains non-finite entries");
}

namespace {

double parse_double(std::string_view tok, std::size_t line, const char* what) {
    std::string s(tok);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ParseError(line, std::string("malformed ") + what + " '" + s + "'");
    return v;
}

std::size_t parse_index(std::string_view tok, std::size_t line) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0)
        throw ParseError(line, "malformed feature index '" + std::string(tok) + "'");
    return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool is_header(const std::vector<std::string_view>& toks) {
    if (toks.size() != 4) return false;
    for (auto t : toks)
        if (t.find(':') != std::string_view::npos) return false;
    return std::isalpha(static_cast<unsigned char>(toks[3].front())) != 0;
}

void write_number(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

Dataset read_libsvm(std::istream& in) {
    Dataset data;
    data.provenance = "libsvm-file";
    std::size_t header_d = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto toks = split_ws(line);
        if (toks.empty() || toks.front().front() == '#') continue;
        if (first && is_header(toks)) {
            first = false;
            header_d = parse_index(toks[1], lineno);
            data.provenance = "synthetic";
            continue;
        }
        first = false;
        const double label = parse_double(toks[0], lineno, "label");
        std::vector<std::pair<std::size_t, double>> entries;
        for (std::size_t t = 1; t < toks.size(); ++t) {
            const auto colon = toks[t].find(':');
            if (colon == std::string_view::npos) throw ParseError(lineno, "expected idx:val, got '" + std::string(toks[t]) + "'");
            const std::size_t idx = parse_index(toks[t].substr(0, colon), lineno);
            const double val = parse_double(toks[t].substr(colon + 1), lineno, "feature value");
            entries.emplace_back(idx - 1, val);
        }
        std::sort(entries.begin(), entries.end());
        for (std::size_t k = 1; k < entries.size(); ++k)
            if (entries[k].first == entries[k - 1].first)
                throw ParseError(lineno, "duplicate feature index " + std::to_string(entries[k].first + 1));
        data.add_row(entries, label);
    }
    data.d = std::max(data.d, header_d);
    if (data.n == 0) {
        warn("LIBSVM input contains no rows");
        return data;
    }
    bool ternary = true;
    for (double y : data.labels)
        if (y != -1.0 && y != 0.0 && y != 1.0) ternary = false;
    if (ternary)
        for (double& y : data.labels)
            if (y == 0.0) y = -1.0;
    data.validate();
    return data;
}

Dataset load_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_libsvm(in);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.n; ++i) {
        write_number(out, data.labels[i]);
        for (std::size_t k = data.row_ptr[i]; k < data.row_ptr[i + 1]; ++k) {
            out << ' ' << data.cols[k] + 1 << ':';
            write_number(out, data.vals[k]);
        }
        out << '\n';
    }
}

void save_libsvm(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_libsvm(out, data);
}

void save_synthetic(const std::string& path, const Dataset& data, std::uint64_t seed, const std::string& dist) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << data.n << ' ' << data.d << ' ' << seed << ' ' << dist << '\n';
    write_libsvm(out, data);
}

double spectral_norm_sq(const Dataset& data) {
    if (data.n == 0) throw DataError("spectral norm of an empty matrix");
    if (data.vals.empty() || kernels::max_abs(data.vals) == 0.0) return 0.0;
    // fixed pseudo-random start avoids starting orthogonal to the top eigenvector
    Rng rng(0x5eedULL);
    Vector v(data.d);
    for (double& x : v) x = rng.uniform(0.5, 1.5);
    kernels::scale(1.0 / std::sqrt(kernels::sum_sq(v)), v, v);
    Vector Av(data.n), next(data.d);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t i = 0; i < data.n; ++i) Av[i] = data.row_dot(i, v);
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < data.n; ++i) data.row_axpy(i, Av[i], next);
        const double rayleigh = kernels::sum_sq(Av);
        const double norm = std::sqrt(kernels::sum_sq(next));
        if (norm == 0.0) return rayleigh;
        kernels::scale(1.0 / norm, next, v);
        const bool converged = it > 0 && std::fabs(rayleigh - lambda) <= 1e-10 * rayleigh;
        lambda = rayleigh;
        if (converged) break;
    }
    // Rayleigh quotient at the final iterate
    for (std::size_t i = 0; i < data.n; ++i) Av[i] = data.row_dot(i, v);
    return std::max(lambda, kernels::sum_sq(Av));
}

double estimate_lipschitz(const Dataset& data) {
    if (data.n == 0) throw DataError("estimate_lipschitz needs n >= 1");
    const double lmax = spectral_norm_sq(data);
    if (lmax == 0.0) {
        warn("data matrix is all zero; Lipschitz estimate is 0");
        return 0.0;
    }
    return 0.8 * lmax / static_cast<double>(data.n);
}

}  // namespace nprr
