#include "fracsum/text_format.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fracsum/errors.hpp"

namespace fracsum {
namespace {

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::int64_t parse_int(std::string_view tok, int line_no)
{
    std::int64_t v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
    {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '"
                         + std::string(tok) + "'");
    }
    return v;
}

// Calls `row(tokens, line_no)` for every data line after the header.
template<class F>
int scan(std::string_view text, F&& row)
{
    int d = 0;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (d == 0)
        {
            if (line.substr(0, 2) != "d=")
                throw ParseError("line " + std::to_string(line_no)
                                 + ": expected header 'd=<int>'");
            d = static_cast<int>(parse_int(trim(line.substr(2)), line_no));
            if (d < 1 || d > kMaxDim)
                throw ParseError("dimension must lie in [1, 8]");
            continue;
        }
        row(split_ws(line), line_no, d);
    }
    if (d == 0)
        throw ParseError("missing header 'd=<int>'");
    return d;
}

}  // namespace

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{})
        throw Error("failed to format double");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text)
{
    text = trim(text);
    double v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError("bad real number '" + std::string(text) + "'");
    return v;
}

std::string format_point_set(PointSet const& set)
{
    std::string out = "d=" + std::to_string(set.dim()) + "\n";
    for (auto const& p : set)
    {
        for (int i = 0; i < p.dim(); ++i)
        {
            if (i)
                out += ' ';
            out += std::to_string(p[i]);
        }
        out += '\n';
    }
    return out;
}

PointSet parse_point_set(std::string_view text)
{
    std::vector<LatticePoint> pts;
    int d = scan(text, [&](auto const& toks, int line_no, int dim) {
        if (static_cast<int>(toks.size()) != dim)
            throw ParseError("line " + std::to_string(line_no) + ": expected "
                             + std::to_string(dim) + " coordinates");
        LatticePoint::Coords c{};
        for (int i = 0; i < dim; ++i)
            c[i] = parse_int(toks[i], line_no);
        pts.emplace_back(std::span<std::int64_t const>(c.data(), dim));
    });
    return PointSet(d, std::move(pts));
}

std::string format_weighted_points(PointSet const& support,
                                   std::span<double const> weights)
{
    if (weights.size() != support.size())
        throw InvalidArgument("weights must align with support");
    std::string out = "d=" + std::to_string(support.dim()) + "\n";
    for (std::size_t k = 0; k < support.size(); ++k)
    {
        auto const& p = support[k];
        for (int i = 0; i < p.dim(); ++i)
        {
            out += std::to_string(p[i]);
            out += ' ';
        }
        out += format_double(weights[k]);
        out += '\n';
    }
    return out;
}

WeightedPoints parse_weighted_points(std::string_view text)
{
    std::vector<std::pair<LatticePoint, double>> rows;
    int d = scan(text, [&](auto const& toks, int line_no, int dim) {
        if (static_cast<int>(toks.size()) != dim + 1)
            throw ParseError("line " + std::to_string(line_no) + ": expected "
                             + std::to_string(dim) + " coordinates and a weight");
        LatticePoint::Coords c{};
        for (int i = 0; i < dim; ++i)
            c[i] = parse_int(toks[i], line_no);
        rows.emplace_back(LatticePoint(std::span<std::int64_t const>(c.data(), dim)),
                          parse_double(toks[dim]));
    });
    std::vector<LatticePoint> pts;
    pts.reserve(rows.size());
    for (auto const& r : rows)
        pts.push_back(r.first);
    WeightedPoints out{PointSet(d, pts), {}};
    if (out.support.size() != rows.size())
        throw ParseError("duplicate points in weighted point list");
    out.weights.assign(rows.size(), 0.0);
    for (auto const& r : rows)
        out.weights[*out.support.index_of(r.first)] = r.second;
    return out;
}

std::string read_text_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(std::filesystem::path const& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

PointSet read_point_set_file(std::filesystem::path const& path)
{
    return parse_point_set(read_text_file(path));
}

void write_point_set_file(std::filesystem::path const& path, PointSet const& set)
{
    write_text_file(path, format_point_set(set));
}

}  // namespace fracsum
