#pragma once

// Deterministic CSV and SVG output. Numbers are written with 17 significant
// digits so identical inputs give identical bytes.

#include <filesystem>
#include <string>
#include <vector>

namespace tsalc {

std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& content);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    bool has(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Numeric CSV with a header row. Throws IoError.
CsvTable read_csv(const std::filesystem::path& path);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct ChartSpec {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
};

/// Self-contained SVG line chart. Non-finite points (and non-positive ones on
/// a log axis) break the line.
std::string render_svg(const ChartSpec& chart);

struct PlotData {
    std::vector<double> t;
    std::vector<double> cost;
    std::vector<double> mass_true;     // empty without a known truth
    std::vector<double> mass_outside;  // empty without diagnostics
    std::vector<double> regret;
    std::vector<double> bound;
};

/// Per-figure CSV and SVG files in `dir`. Without diagnostics only the cost
/// chart is written. Returns the file names written, in order.
std::vector<std::string> emit_plots(const PlotData& data, const std::filesystem::path& dir);

}  // namespace tsalc
