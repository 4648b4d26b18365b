#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nprr/harness.hpp"

namespace nprr {

namespace {

const std::vector<std::string>& aggregated_metrics() {
    static const std::vector<std::string> m = {"step_size", "psi",    "rel_err", "nat_res",
                                               "fnor_norm", "merit", "sigma2",  "err_norm"};
    return m;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::vector<Curve> aggregate_csv_text(const std::vector<std::string>& csv_texts) {
    const auto& cols = csv_columns();
    std::map<std::string, std::size_t> col_index;
    for (std::size_t c = 0; c < cols.size(); ++c) col_index[cols[c]] = c;

    struct RunRows {
        std::size_t group;
        bool completed = true;
        std::vector<std::vector<std::string>> rows;
    };
    std::vector<Curve> curves;
    std::vector<RunRows> runs;
    std::map<std::pair<std::size_t, std::string>, std::size_t> run_of;  // (source, run_id) -> run

    for (std::size_t src = 0; src < csv_texts.size(); ++src) {
        std::istringstream in(csv_texts[src]);
        std::string line;
        if (!std::getline(in, line)) throw DataError("CSV input " + std::to_string(src) + " is empty");
        const auto header = split_csv_line(line);
        for (std::size_t c = 0; c < std::max(header.size(), cols.size()); ++c) {
            if (c >= header.size()) throw DataError("CSV schema mismatch: missing column '" + cols[c] + "'");
            if (c >= cols.size()) throw DataError("CSV schema mismatch: unexpected column '" + header[c] + "'");
            if (header[c] != cols[c])
                throw DataError("CSV schema mismatch: column '" + header[c] + "' where '" + cols[c] + "' expected");
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto fields = split_csv_line(line);
            if (fields.size() != cols.size()) throw DataError("CSV row has " + std::to_string(fields.size()) + " fields");
            const std::string& alg = fields[col_index["algorithm"]];
            const std::string& sid = fields[col_index["schedule_id"]];
            auto key = std::make_pair(src, fields[col_index["run_id"]]);
            auto it = run_of.find(key);
            if (it == run_of.end()) {
                std::size_t g = 0;
                const Algorithm a = parse_algorithm(alg);
                while (g < curves.size() && !(curves[g].algorithm == a && curves[g].schedule_id == sid)) ++g;
                if (g == curves.size()) {
                    Curve c;
                    c.algorithm = a;
                    c.schedule_id = sid;
                    curves.push_back(c);
                }
                ++curves[g].runs;
                runs.push_back(RunRows{g, true, {}});
                it = run_of.emplace(key, runs.size() - 1).first;
            }
            RunRows& r = runs[it->second];
            if (fields[col_index["feasible"]] != "1") r.completed = false;
            r.rows.push_back(std::move(fields));
        }
    }

    for (std::size_t g = 0; g < curves.size(); ++g) {
        Curve& curve = curves[g];
        std::map<double, std::map<std::string, std::vector<double>>> by_epoch;
        for (const RunRows& r : runs) {
            if (r.group != g || !r.completed) continue;
            ++curve.completed;
            for (const auto& row : r.rows) {
                const double epoch = std::stod(row[col_index["epoch"]]);
                auto& slot = by_epoch[epoch];
                for (const auto& m : aggregated_metrics()) {
                    const std::string& f = row[col_index[m]];
                    if (!f.empty()) slot[m].push_back(std::stod(f));
                }
            }
        }
        for (const auto& [epoch, values] : by_epoch) {
            curve.epochs.push_back(epoch);
            for (const auto& m : aggregated_metrics()) {
                const auto it = values.find(m);
                if (it == values.end() || it->second.empty()) {
                    curve.mean[m].push_back(std::numeric_limits<double>::quiet_NaN());
                    curve.median[m].push_back(std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                double s = 0.0;
                for (double v : it->second) s += v;
                curve.mean[m].push_back(s / static_cast<double>(it->second.size()));
                curve.median[m].push_back(median_of(it->second));
            }
        }
    }
    return curves;
}

std::vector<Curve> aggregate(const std::vector<std::string>& csv_paths) {
    std::vector<std::string> texts;
    for (const auto& path : csv_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        texts.push_back(ss.str());
    }
    return aggregate_csv_text(texts);
}

std::string format_aggregate(const std::vector<Curve>& curves) {
    std::ostringstream os;
    os << "algorithm,schedule_id,epoch,runs,completed,success_rate";
    for (const auto& m : aggregated_metrics()) os << ',' << m << "_mean," << m << "_median";
    os << '\n';
    for (const Curve& c : curves) {
        if (c.epochs.empty()) {
            os << to_string(c.algorithm) << ',' << c.schedule_id << ",," << c.runs << ',' << c.completed << ','
               << format_number(c.success_rate());
            for (std::size_t m = 0; m < aggregated_metrics().size(); ++m) os << ",,";
            os << '\n';
            continue;
        }
        for (std::size_t j = 0; j < c.epochs.size(); ++j) {
            os << to_string(c.algorithm) << ',' << c.schedule_id << ',' << format_number(c.epochs[j]) << ',' << c.runs
               << ',' << c.completed << ',' << format_number(c.success_rate());
            for (const auto& m : aggregated_metrics())
                os << ',' << format_number(c.mean.at(m)[j]) << ',' << format_number(c.median.at(m)[j]);
            os << '\n';
        }
    }
    return os.str();
}

std::string render_plot(const std::vector<Curve>& curves, const std::string& metric) {
    constexpr double kFloor = 1e-16;
    struct Series {
        std::string label;
        std::vector<std::pair<double, double>> pts;  // (epoch, log10 value)
    };
    std::vector<Series> series;
    bool clamped = false;
    for (const Curve& c : curves) {
        const auto it = c.mean.find(metric);
        if (it == c.mean.end()) continue;
        Series s;
        s.label = to_string(c.algorithm) + " | " + c.schedule_id;
        for (std::size_t j = 0; j < c.epochs.size(); ++j) {
            double v = it->second[j];
            if (std::isnan(v)) continue;
            if (v <= kFloor) {
                if (v < kFloor) clamped = true;
                v = kFloor;
            }
            s.pts.emplace_back(c.epochs[j], std::log10(v));
        }
        if (!s.pts.empty()) series.push_back(std::move(s));
    }
    if (series.empty()) return {};

    double xmin = series[0].pts[0].first, xmax = xmin, ymin = series[0].pts[0].second, ymax = ymin;
    for (const auto& s : series)
        for (const auto& [x, y] : s.pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1.0;
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax == ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    }

    const double W = 760, H = 480, left = 80, right = 220, top = 30, bottom = 70;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int ystep = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / 8.0)));
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); e += ystep) {
        os << "<line x1=\"" << left << "\" y1=\"" << fmt(py(e)) << "\" x2=\"" << left + pw << "\" y2=\"" << fmt(py(e))
           << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << fmt(py(e) + 4) << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    for (int t = 0; t <= 5; ++t) {
        const double x = xmin + (xmax - xmin) * t / 5.0;
        os << "<text x=\"" << fmt(px(x)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
           << format_number(std::round(x * 100.0) / 100.0) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 30 << "\" text-anchor=\"middle\">epoch</text>\n";
    os << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << top + ph / 2
       << ")\">" << xml_escape(metric) << " (log scale)</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % 10];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < series[s].pts.size(); ++j)
            os << (j ? " " : "") << fmt(px(series[s].pts[j].first)) << ',' << fmt(py(series[s].pts[j].second));
        os << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(s);
        os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly - 4
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly << "\">" << xml_escape(series[s].label) << "</text>\n";
    }
    if (clamped)
        os << "<text x=\"" << left << "\" y=\"" << H - 8 << "\" font-size=\"10\">note: values at or below 1e-16 are drawn at 1e-16</text>\n";
    os << "</svg>\n";
    return os.str();
}

bool emit_plot(const std::vector<Curve>& curves, const std::string& metric, const std::string& path) {
    const std::string svg = render_plot(curves, metric);
    if (svg.empty()) {
        warn("no data for metric '" + metric + "'; plot not written");
        return false;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << svg;
    return true;
}

}  // namespace nprr
