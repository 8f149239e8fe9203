#include "fracsum/plot_data.hpp"

#include <cmath>
#include <map>

#include "fracsum/errors.hpp"
#include "fracsum/text_format.hpp"

namespace fracsum {
namespace {

std::string sanitize(std::string s)
{
    for (char& ch : s)
    {
        bool const ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z')
                        || (ch >= '0' && ch <= '9') || ch == '.' || ch == '-';
        if (!ok)
            ch = '_';
    }
    return s;
}

std::string transform(std::string const& value, bool log2_y)
{
    if (!log2_y)
        return value;
    return format_double(std::log2(parse_double(value)));
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        if (header[i] == name)
            return i;
    }
    throw ParseError("CSV has no column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable t;
    auto lines = split(text, '\n');
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty() || lines.front().empty())
        throw ParseError("CSV is missing its header line");
    t.header = split(lines.front(), ',');
    for (std::size_t i = 1; i < lines.size(); ++i)
    {
        if (lines[i].empty())
            continue;
        auto row = split(lines[i], ',');
        if (row.size() != t.header.size())
            throw ParseError("CSV line " + std::to_string(i + 1) + " has " + std::to_string(row.size())
                             + " fields, expected " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<PlotSpec> default_plot_specs(ExperimentKind kind)
{
    switch (kind)
    {
        case ExperimentKind::fp_cap_ratio:
            return {{"fp_cap_ratio", "k", "ratio", std::nullopt, std::nullopt, {"d", "beta", "family"}, false}};
        case ExperimentKind::main_band:
            return {{"main_band_log2R", "m", "R", std::nullopt, std::nullopt, {"family", "n"}, true},
                    {"main_band_estimate", "n", "estimate", "ci_low", "ci_high", {"family", "m"}, false},
                    {"main_band_lower", "m", "R_lower", std::nullopt, std::nullopt, {"family", "n"}, false},
                    {"main_band_upper", "m", "R_upper", std::nullopt, std::nullopt, {"family", "n"}, false}};
        case ExperimentKind::cap_compare:
            return {{"cap_compare", "m", "log2_ratio", std::nullopt, std::nullopt, {}, false}};
        case ExperimentKind::pz_diag:
            return {{"pz_diag", "probability", "pz_bound", std::nullopt, std::nullopt, {"measure"}, false}};
        case ExperimentKind::srw_band:
            return {{"srw_band", "x_norm", "ratio", std::nullopt, std::nullopt, {"family", "radius"}, false}};
    }
    return {};
}

std::vector<std::filesystem::path> emit_plot_data(std::string_view csv, PlotSpec const& spec,
                                                  std::filesystem::path const& out_dir)
{
    CsvTable const table = parse_csv(csv);
    std::size_t const xi = table.column(spec.x);
    std::size_t const yi = table.column(spec.y);
    std::optional<std::size_t> lo;
    std::optional<std::size_t> hi;
    if (spec.y_low && spec.y_high)
    {
        lo = table.column(*spec.y_low);
        hi = table.column(*spec.y_high);
    }
    std::vector<std::size_t> series;
    for (auto const& s : spec.series)
        series.push_back(table.column(s));

    std::string header = "# " + spec.x + " " + (spec.log2_y ? "log2(" + spec.y + ")" : spec.y);
    if (lo)
        header += " yerr";
    header += "\n";

    std::vector<std::string> order;
    std::map<std::string, std::string> bodies;
    for (auto const& row : table.rows)
    {
        std::string key;
        for (std::size_t k = 0; k < series.size(); ++k)
        {
            if (k)
                key += "_";
            key += spec.series[k] + "=" + row[series[k]];
        }
        if (!bodies.count(key))
            order.push_back(key);
        std::string& body = bodies[key];
        if (row[yi].empty())
            continue;
        body += row[xi] + " " + transform(row[yi], spec.log2_y);
        if (lo)
        {
            double const half = 0.5 * (parse_double(row[*hi]) - parse_double(row[*lo]));
            body += " " + format_double(half);
        }
        body += "\n";
    }

    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    if (order.empty())
    {
        auto path = out_dir / (spec.name + ".dat");
        write_text_file(path, header);
        written.push_back(path);
        return written;
    }
    for (auto const& key : order)
    {
        std::string const file = key.empty() ? spec.name : spec.name + "_" + sanitize(key);
        auto path = out_dir / (file + ".dat");
        write_text_file(path, header + bodies[key]);
        written.push_back(path);
    }
    return written;
}

}  // namespace fracsum
