#include "tsalc/plots.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsalc/common.hpp"

namespace tsalc {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
        s += '\n';
    }
    write_text(path, s);
}

bool CsvTable::has(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("missing CSV column " + name);
    return columns[static_cast<std::size_t>(it - header.begin())];
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV " + path.string());
    table.header = split(line);
    table.columns.resize(table.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size()) throw IoError("ragged CSV row in " + path.string());
        for (std::size_t i = 0; i < cells.size(); ++i) table.columns[i].push_back(std::strtod(cells[i].c_str(), nullptr));
    }
    return table;
}

// --- SVG -------------------------------------------------------------------

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

bool usable(double y, bool log_y) { return std::isfinite(y) && (!log_y || y > 0.0); }

double nice_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string render_svg(const ChartSpec& chart) {
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !usable(s.y[i], chart.log_y)) continue;
            const double y = chart.log_y ? std::log10(s.y[i]) : s.y[i];
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    const bool empty = !std::isfinite(x_lo);
    if (empty) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (chart.log_y) {
        y_lo = std::floor(y_lo);
        y_hi = std::ceil(y_hi);
        if (y_hi == y_lo) y_hi = y_lo + 1.0;
    } else {
        if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";
    o << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw) << "\" height=\""
      << fixed(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    const double xs = nice_step(x_hi - x_lo);
    for (double x = std::ceil(x_lo / xs) * xs; x <= x_hi + 1e-9 * xs; x += xs) {
        o << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(px(x))
          << "\" y2=\"" << fixed(kTop + ph + 5) << "\" stroke=\"#333\"/>\n";
        o << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(kTop + ph + 19) << "\" text-anchor=\"middle\">"
          << tick_label(x) << "</text>\n";
    }
    const double ys = chart.log_y ? std::max(1.0, std::ceil((y_hi - y_lo) / 8.0)) : nice_step(y_hi - y_lo);
    for (double y = std::ceil(y_lo / ys) * ys; y <= y_hi + 1e-9 * ys; y += ys) {
        o << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(y)) << "\" x2=\"" << fixed(kLeft + pw)
          << "\" y2=\"" << fixed(py(y)) << "\" stroke=\"#ddd\"/>\n";
        const std::string label = chart.log_y ? "1e" + tick_label(y) : tick_label(y);
        o << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(y) + 4) << "\" text-anchor=\"end\">" << label
          << "</text>\n";
    }
    o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 12) << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << fixed(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label + (chart.log_y ? " (log scale)" : "")) << "</text>\n";

    double legend_y = kTop + 10;
    for (const auto& s : chart.series) {
        std::string d;
        bool pen_down = false;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !usable(s.y[i], chart.log_y)) {
                pen_down = false;
                continue;
            }
            const double y = chart.log_y ? std::log10(s.y[i]) : s.y[i];
            d += (pen_down ? " L" : (d.empty() ? "M" : " M")) + fixed(px(s.x[i])) + " " + fixed(py(y));
            pen_down = true;
        }
        if (!d.empty()) {
            o << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
              << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        }
        const double lx = kLeft + pw + 12;
        o << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << fixed(lx + 22) << "\" y2=\""
          << fixed(legend_y) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        o << "<text x=\"" << fixed(lx + 28) << "\" y=\"" << fixed(legend_y + 4) << "\">" << escape(s.name)
          << "</text>\n";
        legend_y += 18;
    }
    if (empty)
        o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kTop + ph / 2)
          << "\" text-anchor=\"middle\" fill=\"#888\">no data</text>\n";
    o << "</svg>\n";
    return o.str();
}

namespace {

void emit_one(const fs::path& dir, const std::string& stem, const ChartSpec& chart, std::vector<std::string>& written) {
    std::vector<std::string> header{"t"};
    for (const auto& s : chart.series) header.push_back(s.name);
    std::vector<std::vector<std::string>> rows;
    const auto& xs = chart.series.front().x;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<std::string> row{format_number(xs[i])};
        for (const auto& s : chart.series) row.push_back(format_number(i < s.y.size() ? s.y[i] : NAN));
        rows.push_back(std::move(row));
    }
    write_csv(dir / (stem + ".csv"), header, rows);
    write_text(dir / (stem + ".svg"), render_svg(chart));
    written.push_back(stem + ".csv");
    written.push_back(stem + ".svg");
}

}  // namespace

std::vector<std::string> emit_plots(const PlotData& data, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create plot directory " + dir.string());
    std::vector<std::string> written;
    if (!data.mass_true.empty())
        emit_one(dir, "mass_true",
                 {"Posterior mass on the true hypothesis", "t", "F(truth)", false,
                  {{"mass_true", data.t, data.mass_true}}},
                 written);
    if (!data.mass_outside.empty())
        emit_one(dir, "mass_outside",
                 {"Posterior mass outside the neighborhood", "t", "P(outside)", true,
                  {{"mass_outside", data.t, data.mass_outside, "#d62728"}}},
                 written);
    if (!data.regret.empty())
        emit_one(dir, "regret",
                 {"Regret and bound", "t", "regret", false,
                  {{"regret", data.t, data.regret}, {"bound", data.t, data.bound, "#2ca02c", true}}},
                 written);
    emit_one(dir, "cost", {"Cost per segment", "t", "J", false, {{"cost", data.t, data.cost, "#9467bd"}}}, written);
    return written;
}

}  // namespace tsalc
