#include "nvscc/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nvscc::io {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void Table::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != header.size()) throw std::invalid_argument("csv: row width does not match header");
    rows.push_back(std::move(cells));
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return out;
}

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

}  // namespace

void write_table(const std::filesystem::path& path, const Table& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("csv: cannot write " + path.string());
    write_row(os, table.header);
    for (const auto& r : table.rows) write_row(os, r);
    if (!os) throw std::runtime_error("csv: write failed for " + path.string());
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("csv: cannot open " + path.string());
    Table t;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        t.rows.push_back(split(line));
    }
    if (t.header.empty()) throw std::runtime_error("csv: " + path.string() + " has no header row");
    return t;
}

Spectrum read_spectrum_csv(const std::filesystem::path& path, double step) {
    const Table t = read_table(path);
    if (t.header.size() < 2) throw std::runtime_error("csv: " + path.string() + " needs columns energy_ev,value");
    std::vector<double> e;
    std::vector<double> v;
    for (const auto& row : t.rows) {
        if (row.size() < 2) throw std::runtime_error("csv: short row in " + path.string());
        try {
            e.push_back(std::stod(row[0]));
            v.push_back(std::stod(row[1]));
        } catch (const std::exception&) {
            throw std::runtime_error("csv: non-numeric entry in " + path.string());
        }
    }
    if (e.size() < 2) throw std::runtime_error("csv: " + path.string() + " needs at least two samples");
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < e.size(); ++i) {
        if (!(e[i] > e[i - 1])) throw std::runtime_error("csv: energies in " + path.string() + " are not increasing");
        min_gap = std::min(min_gap, e[i] - e[i - 1]);
    }
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::runtime_error("csv: negative or non-finite value in " + path.string());
    }
    const double h = step > 0.0 ? step : min_gap;
    const auto count = static_cast<Eigen::Index>(std::floor((e.back() - e.front()) / h + 1e-9)) + 1;
    Spectrum s{e.front(), h, Eigen::VectorXd(count)};
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < count; ++i) {
        const double x = s.energy(i);
        while (k + 2 < e.size() && e[k + 1] < x) ++k;
        const double t = std::clamp((x - e[k]) / (e[k + 1] - e[k]), 0.0, 1.0);
        s.values(i) = (1.0 - t) * v[k] + t * v[k + 1];
    }
    return s;
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s, const nlohmann::json& metadata) {
    validate(s);
    Table t;
    t.header = {"energy_ev", "value"};
    for (Eigen::Index i = 0; i < s.size(); ++i) t.add_row({s.energy(i), s.values(i)});
    write_table(path, t);
    if (!metadata.is_null()) {
        nlohmann::json meta = metadata;
        meta["grid_spacing_ev"] = s.step;
        meta["grid_start_ev"] = s.start;
        meta["points"] = s.size();
        std::ofstream os(path.string() + ".meta.json", std::ios::binary);
        if (!os) throw std::runtime_error("csv: cannot write metadata for " + path.string());
        os << meta.dump(2) << '\n';
    }
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series) {
    constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
    static const char* colors[] = {"#e6a700", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (double x : s.x) x0 = std::min(x0, x), x1 = std::max(x1, x);
        for (double y : s.y) y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
    if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("plot: cannot write " + path.string());
    char buf[256];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                  W - L - R, H - T - B);
    os << buf;
    os << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0;
        const double yv = y0 + (y1 - y0) * k / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << format_number(std::round(xv * 1e4) / 1e4) << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = colors[i % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[k]), py(s.y[k]));
            os << buf;
        }
        os << "\"/>\n";
        os << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 16 * i << "\" text-anchor=\"end\" fill=\"" << color << "\">"
           << s.label << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace nvscc::io
