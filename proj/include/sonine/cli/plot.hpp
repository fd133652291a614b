#ifndef SONINE_CLI_PLOT_HPP
#define SONINE_CLI_PLOT_HPP

// CSV reading and single-panel SVG line plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sonine/errors.hpp"
#include "sonine/fit.hpp"

namespace sonine::cli {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t index(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw DataError("CSV has no column '" + name + "'");
    }

    bool has(const std::string& name) const {
        return std::find(header.begin(), header.end(), name) != header.end();
    }

    std::vector<double> numeric(const std::string& name) const {
        const auto c = index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& s = rows[r][c];
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                out.push_back(v);
            } catch (const std::exception&) {
                throw DataError("row " + std::to_string(r + 2) + ", column '" + name +
                                "': not a number ('" + s + "')");
            }
        }
        return out;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
            else if (c == '"') quoted = false;
            else cur += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw DataError("line " + std::to_string(lineno) + ": unterminated quoted field");
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_line(line, lineno);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty()) throw DataError(path + ": empty CSV");
    if (t.rows.empty()) throw DataError(path + ": CSV has a header but no rows");
    return t;
}

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::string annotation;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

/// Renders the series; points with non-finite coordinates (or y <= 0 on a
/// log axis) are skipped.
inline std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec) {
    constexpr double W = 640, H = 420, L = 80, R = 20, T = 40, B = 60;
    auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    std::size_t usable = 0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && s.y[i] <= 0.0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
            ++usable;
        }
    if (usable == 0) throw DataError("nothing to plot: no finite points");
    if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
    if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::escape_xml(spec.title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = px(fx);
        const double sy = H - B - (fy - y0) / (y1 - y0) * (H - T - B);
        o << "<text x=\"" << sx << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
          << detail::fmt(fx) << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
          << (spec.log_y ? "1e" + detail::fmt(fy) : detail::fmt(fy)) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << detail::escape_xml(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::escape_xml(spec.y_label + (spec.log_y ? " (log scale)" : "")) << "</text>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        o << "<polyline fill=\"none\" stroke=\"" << colors[k % 5] << "\" stroke-width=\"1.5\""
          << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && s.y[i] <= 0.0)) continue;
            o << detail::fmt(px(s.x[i])) << ',' << detail::fmt(py(s.y[i])) << ' ';
        }
        o << "\"/>\n";
        o << "<text x=\"" << W - R - 6 << "\" y=\"" << T + 16 + 14 * k << "\" text-anchor=\"end\" fill=\""
          << colors[k % 5] << "\">" << detail::escape_xml(s.label) << "</text>\n";
    }
    if (!spec.annotation.empty())
        o << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 << "\">" << detail::escape_xml(spec.annotation)
          << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << text;
}

/// Plots column y against column x of a CSV. A column named "fit" is drawn
/// dashed and its log-slope is annotated.
inline void plot_csv(const std::string& csv_path, const std::string& x_col, const std::string& y_col,
                     bool log_y, const std::string& svg_path) {
    const auto t = read_csv(csv_path);
    std::vector<Series> series{{y_col, t.numeric(x_col), t.numeric(y_col), false}};
    PlotSpec spec{y_col + " vs " + x_col, x_col, y_col, log_y, ""};
    if (t.has("fit") && y_col != "fit") {
        Series f{"fit", series[0].x, t.numeric("fit"), true};
        std::vector<double> xs, ly;
        for (std::size_t i = 0; i < f.x.size(); ++i)
            if (std::isfinite(f.y[i]) && f.y[i] > 0.0) {
                xs.push_back(f.x[i]);
                ly.push_back(std::log(f.y[i]));
            }
        if (xs.size() >= 2) spec.annotation = "fitted rate " + detail::fmt(-fit_slope(xs, ly));
        series.push_back(std::move(f));
    }
    const auto svg = render_svg(series, spec);
    write_text(svg_path, svg);
}

}  // namespace sonine::cli

#endif  // SONINE_CLI_PLOT_HPP
