#include "fracsum/config.hpp"

#include <charconv>

#include "fracsum/errors.hpp"
#include "fracsum/text_format.hpp"

namespace fracsum {
namespace {

using Params = std::map<std::string, std::string>;

Params default_params(ExperimentKind kind)
{
    switch (kind)
    {
        case ExperimentKind::fp_cap_ratio:
            return {{"dims", "1,2"},
                    {"betas", "0.5,1"},
                    {"levels", "4..8"},
                    {"families", "singleton,pair,subcube,segment"}};
        case ExperimentKind::main_band:
            return {{"d", "1"},
                    {"p", "0.6"},
                    {"q", "0.6"},
                    {"m", "1..4"},
                    {"n_max", "8"},
                    {"families", "singleton,pair,cube"},
                    {"slope_n", "8"},
                    {"slope_tolerance", "0.2"},
                    {"cross_check", "true"}};
        case ExperimentKind::cap_compare:
            return {{"d", "2"},
                    {"a", "0.5"},
                    {"b", "1.5"},
                    {"pair_distance", "4"},
                    {"m", "2..6"},
                    {"samples", "200"},
                    {"slope_tolerance", "0.2"}};
        case ExperimentKind::pz_diag:
            return {{"d", "1"},
                    {"pq", "0.6:0.7,0.55:0.8"},
                    {"levels", "1:1,1:2,2:2"},
                    {"targets", "0|-1|-2;1|-1;0"}};
        case ExperimentKind::srw_band:
            return {{"d", "5"},
                    {"x_norms", "8,16"},
                    {"radius_factor", "8"},
                    {"families", "singleton,pair"},
                    {"pair_distance", "2"},
                    {"soft", "true"}};
    }
    return {};
}

}  // namespace

//---------------------------------------------------------------------------//
char const* to_string(ExperimentKind k)
{
    switch (k)
    {
        case ExperimentKind::fp_cap_ratio:
            return "fp_cap_ratio";
        case ExperimentKind::main_band:
            return "main_band";
        case ExperimentKind::cap_compare:
            return "cap_compare";
        case ExperimentKind::pz_diag:
            return "pz_diag";
        case ExperimentKind::srw_band:
            return "srw_band";
    }
    return "?";
}

std::vector<ExperimentKind> all_experiments()
{
    return {ExperimentKind::fp_cap_ratio, ExperimentKind::main_band,
            ExperimentKind::cap_compare, ExperimentKind::pz_diag, ExperimentKind::srw_band};
}

ExperimentKind parse_experiment_kind(std::string_view s)
{
    for (auto k : all_experiments())
    {
        if (s == to_string(k))
            return k;
    }
    throw ParseError("unknown experiment '" + std::string(s) + "'");
}

//---------------------------------------------------------------------------//
std::string_view trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;)
    {
        auto const pos = text.find(sep, start);
        out.emplace_back(trim(text.substr(start, pos == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

std::int64_t parse_int(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError("expected an integer, got '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_uint(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError("expected an unsigned integer, got '" + std::string(s) + "'");
    return v;
}

bool parse_bool(std::string_view s)
{
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw ParseError("expected a boolean, got '" + std::string(s) + "'");
}

std::vector<int> parse_int_list(std::string_view text)
{
    std::vector<int> out;
    for (auto const& item : split(text, ','))
    {
        if (item.empty())
            continue;
        auto const dots = item.find("..");
        if (dots == std::string::npos)
        {
            out.push_back(static_cast<int>(parse_int(item)));
            continue;
        }
        auto const lo = parse_int(std::string_view(item).substr(0, dots));
        auto const hi = parse_int(std::string_view(item).substr(dots + 2));
        if (hi < lo || hi - lo > 100000)
            throw ParseError("bad integer range '" + item + "'");
        for (auto v = lo; v <= hi; ++v)
            out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view text)
{
    std::vector<double> out;
    for (auto const& item : split(text, ','))
    {
        if (!item.empty())
            out.push_back(parse_double(item));
    }
    return out;
}

LatticePoint parse_point(std::string_view text, int d)
{
    auto const parts = split(text, ',');
    if (static_cast<int>(parts.size()) != d)
        throw ParseError("point '" + std::string(text) + "' does not have "
                         + std::to_string(d) + " coordinates");
    LatticePoint x(d);
    for (int i = 0; i < d; ++i)
        x = x.with(i, parse_int(parts[static_cast<std::size_t>(i)]));
    return x;
}

PointSet parse_point_list(std::string_view text, int d)
{
    std::vector<LatticePoint> pts;
    for (auto const& item : split(text, ';'))
    {
        if (!item.empty())
            pts.push_back(parse_point(item, d));
    }
    if (pts.empty())
        throw ParseError("empty point list");
    return PointSet(d, std::move(pts));
}

std::string format_point_list(PointSet const& s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        if (i)
            out += ';';
        for (int j = 0; j < s.dim(); ++j)
        {
            if (j)
                out += ',';
            out += std::to_string(s[i][j]);
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind)
{
    ExperimentConfig c;
    c.experiment = kind;
    c.params = default_params(kind);
    if (kind == ExperimentKind::srw_band)
        c.band_limit = 10;
    if (kind == ExperimentKind::fp_cap_ratio || kind == ExperimentKind::cap_compare)
        c.trials = 0;
    return c;
}

void ExperimentConfig::set(std::string const& key, std::string const& value)
{
    if (key == "experiment")
    {
        auto const kind = parse_experiment_kind(value);
        if (kind != experiment)
        {
            *this = defaults(kind);
        }
    }
    else if (key == "seed")
        seed = parse_uint(value);
    else if (key == "trials")
        trials = parse_uint(value);
    else if (key == "output")
        output = std::string(trim(value));
    else if (key == "explore")
        explore = parse_bool(value);
    else if (key == "band_limit")
        band_limit = parse_double(value);
    else if (key == "workers")
        workers = static_cast<unsigned>(parse_uint(value));
    else if (key == "version")
    {
        if (parse_int(value) != kVersion)
            throw ParseError("unsupported config version " + value);
    }
    else
    {
        auto it = params.find(key);
        if (it == params.end())
            throw ParseError("unknown key '" + key + "' for experiment "
                             + to_string(experiment));
        it->second = std::string(trim(value));
    }
}

std::string const& ExperimentConfig::get(std::string const& key) const
{
    auto it = params.find(key);
    if (it == params.end())
        throw InvalidArgument("missing config key '" + key + "'");
    return it->second;
}

int ExperimentConfig::get_int(std::string const& key) const
{
    return static_cast<int>(parse_int(get(key)));
}

double ExperimentConfig::get_double(std::string const& key) const
{
    return parse_double(get(key));
}

bool ExperimentConfig::get_bool(std::string const& key) const
{
    return parse_bool(get(key));
}

std::vector<int> ExperimentConfig::get_ints(std::string const& key) const
{
    return parse_int_list(get(key));
}

std::vector<double> ExperimentConfig::get_doubles(std::string const& key) const
{
    return parse_double_list(get(key));
}

std::vector<std::string> ExperimentConfig::get_list(std::string const& key) const
{
    std::vector<std::string> out;
    for (auto& s : split(get(key), ','))
    {
        if (!s.empty())
            out.push_back(std::move(s));
    }
    return out;
}

//---------------------------------------------------------------------------//
std::string format_config(ExperimentConfig const& c)
{
    std::string out;
    out += "version=" + std::to_string(ExperimentConfig::kVersion) + "\n";
    out += std::string("experiment=") + to_string(c.experiment) + "\n";
    out += "seed=" + std::to_string(c.seed) + "\n";
    out += "trials=" + std::to_string(c.trials) + "\n";
    if (!c.output.empty())
        out += "output=" + c.output.string() + "\n";
    out += std::string("explore=") + (c.explore ? "true" : "false") + "\n";
    out += "band_limit=" + format_double(c.band_limit) + "\n";
    out += "workers=" + std::to_string(c.workers) + "\n";
    for (auto const& [k, v] : c.params)
        out += k + "=" + v + "\n";
    return out;
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig c;
    bool have_version = false;
    bool have_experiment = false;
    std::vector<std::pair<std::string, std::string>> pending;
    std::size_t line_no = 0;
    for (auto const& raw : split(text, '\n'))
    {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto const eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (!have_version)
        {
            if (key != "version")
                throw ParseError("config must start with a version=" +
                                 std::to_string(ExperimentConfig::kVersion) + " header");
            c.set(key, value);
            have_version = true;
            continue;
        }
        if (key == "experiment")
        {
            if (have_experiment)
                throw ParseError("duplicate experiment key");
            c = ExperimentConfig::defaults(parse_experiment_kind(value));
            have_experiment = true;
            continue;
        }
        pending.emplace_back(std::move(key), std::move(value));
    }
    if (!have_version)
        throw ParseError("config is missing its version header");
    if (!have_experiment)
        throw ParseError("config is missing the experiment key");
    for (auto const& [k, v] : pending)
        c.set(k, v);
    return c;
}

ExperimentConfig read_config_file(std::filesystem::path const& path)
{
    return parse_config(read_text_file(path));
}

}  // namespace fracsum
