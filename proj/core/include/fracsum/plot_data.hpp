#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracsum/config.hpp"

namespace fracsum {

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index; throws ParseError if absent.
    std::size_t column(std::string_view name) const;
};

// Plain comma-separated text without quoting; every row must match the
// header width.
CsvTable parse_csv(std::string_view text);

/*!
 * Projection of a CSV onto two-column (x, y[, yerr]) series, one file per
 * distinct value of the series columns.
 */
struct PlotSpec
{
    std::string name;
    std::string x;
    std::string y;
    // Optional interval columns; yerr is written as (high - low) / 2.
    std::optional<std::string> y_low;
    std::optional<std::string> y_high;
    std::vector<std::string> series;
    bool log2_y = false;
};

std::vector<PlotSpec> default_plot_specs(ExperimentKind kind);

// Writes <out_dir>/<name>[_<series>].dat and returns the written paths in
// series order of first appearance. An empty table yields <name>.dat with
// the header line only.
std::vector<std::filesystem::path> emit_plot_data(std::string_view csv, PlotSpec const& spec,
                                                  std::filesystem::path const& out_dir);

}  // namespace fracsum
