// csv.hpp: CSV tables, spectrum files with JSON sidecars, and SVG line plots.
#pragma once

#include "nvscc/sideband.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace nvscc::io {

/// Shortest round-trip-stable text for a double ("%.12g").
std::string format_number(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    void add_row(std::vector<std::string> cells);
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Reads `energy_ev,value` (header required, energies strictly increasing) and
/// resamples linearly onto a uniform grid. A non-positive `step` selects the
/// smallest spacing present in the file.
Spectrum read_spectrum_csv(const std::filesystem::path& path, double step = 0.0);

/// Writes `energy_ev,value` and, when metadata is non-null, `<path>.meta.json`.
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s,
                        const nlohmann::json& metadata = nlohmann::json());

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series);

}  // namespace nvscc::io
