#include "fracsum/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracsum/errors.hpp"
#include "fracsum/text_format.hpp"

namespace fracsum {
namespace {

template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct RealBox
{
    std::vector<double> lo;
    std::vector<double> hi;
};

RealBox bounding_box(ShapeSpec const& s)
{
    int const d = s.dim;
    return std::visit(
        Overloaded{
            [&](Ball const& b) {
                RealBox r{b.center, b.center};
                for (int i = 0; i < d; ++i)
                {
                    r.lo[i] -= b.radius;
                    r.hi[i] += b.radius;
                }
                return r;
            },
            [&](Segment const& g) {
                RealBox r{g.from, g.to};
                for (int i = 0; i < d; ++i)
                {
                    r.lo[i] = std::min(g.from[i], g.to[i]);
                    r.hi[i] = std::max(g.from[i], g.to[i]);
                }
                return r;
            },
            [&](AxisBox const& b) { return RealBox{b.lo, b.hi}; },
            [&](CantorSet const&) { return RealBox{{-0.5}, {0.5}}; },
            [&](ShapeUnion const& u) {
                RealBox r{std::vector<double>(d, 1e300), std::vector<double>(d, -1e300)};
                for (auto const& part : u.parts)
                {
                    auto pb = bounding_box(part);
                    for (int i = 0; i < d; ++i)
                    {
                        r.lo[i] = std::min(r.lo[i], pb.lo[i]);
                        r.hi[i] = std::max(r.hi[i], pb.hi[i]);
                    }
                }
                return r;
            },
        },
        s.shape);
}

bool cantor_meets(double a, double b, int depth, double lo, double hi)
{
    if (b < lo || a > hi)
        return false;
    if (depth == 0)
        return true;
    double const third = (b - a) / 3;
    return cantor_meets(a, a + third, depth - 1, lo, hi)
           || cantor_meets(b - third, b, depth - 1, lo, hi);
}

bool segment_meets(Segment const& g, std::span<double const> lo,
                   std::span<double const> hi)
{
    double t0 = 0;
    double t1 = 1;
    for (std::size_t i = 0; i < lo.size(); ++i)
    {
        double const a = g.from[i];
        double const dir = g.to[i] - a;
        if (dir == 0)
        {
            if (a < lo[i] || a > hi[i])
                return false;
            continue;
        }
        double ta = (lo[i] - a) / dir;
        double tb = (hi[i] - a) / dir;
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1)
            return false;
    }
    return true;
}

std::vector<double> parse_coords(std::string_view s)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size())
    {
        auto comma = s.find(',', pos);
        if (comma == std::string_view::npos)
            comma = s.size();
        out.push_back(parse_double(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

std::string format_coords(std::vector<double> const& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ',';
        out += format_double(v[i]);
    }
    return out;
}

std::pair<std::string_view, std::string_view> split_once(std::string_view s, char c)
{
    auto p = s.find(c);
    if (p == std::string_view::npos)
        throw ParseError("malformed shape '" + std::string(s) + "'");
    return {s.substr(0, p), s.substr(p + 1)};
}

}  // namespace

//---------------------------------------------------------------------------//
ShapeSpec ShapeSpec::point(std::vector<double> at)
{
    return ball(std::move(at), 0.0);
}

ShapeSpec ShapeSpec::ball(std::vector<double> center, double radius)
{
    int const d = static_cast<int>(center.size());
    return {d, Ball{std::move(center), radius}};
}

ShapeSpec ShapeSpec::segment(std::vector<double> from, std::vector<double> to)
{
    int const d = static_cast<int>(from.size());
    return {d, Segment{std::move(from), std::move(to)}};
}

ShapeSpec ShapeSpec::box(std::vector<double> lo, std::vector<double> hi)
{
    int const d = static_cast<int>(lo.size());
    return {d, AxisBox{std::move(lo), std::move(hi)}};
}

ShapeSpec ShapeSpec::cantor(int depth)
{
    return {1, CantorSet{depth}};
}

ShapeSpec ShapeSpec::union_of(std::vector<ShapeSpec> parts)
{
    if (parts.empty())
        throw InvalidArgument("union of no shapes");
    int const d = parts.front().dim;
    return {d, ShapeUnion{std::move(parts)}};
}

void validate(ShapeSpec const& s)
{
    if (s.dim < 1 || s.dim > kMaxDim)
        throw InvalidArgument("shape dimension must lie in [1, 8]");
    auto sized = [&](std::vector<double> const& v) {
        if (static_cast<int>(v.size()) != s.dim)
            throw InvalidArgument("shape coordinates do not match its dimension");
    };
    std::visit(Overloaded{
                   [&](Ball const& b) {
                       sized(b.center);
                       if (!(b.radius >= 0))
                           throw InvalidArgument("ball radius must be >= 0");
                   },
                   [&](Segment const& g) {
                       sized(g.from);
                       sized(g.to);
                   },
                   [&](AxisBox const& b) {
                       sized(b.lo);
                       sized(b.hi);
                       for (int i = 0; i < s.dim; ++i)
                       {
                           if (b.lo[i] > b.hi[i])
                               throw InvalidArgument("box with lo > hi");
                       }
                   },
                   [&](CantorSet const& c) {
                       if (s.dim != 1)
                           throw InvalidArgument("Cantor set requires d = 1");
                       if (c.depth < 0 || c.depth > 30)
                           throw InvalidArgument("Cantor depth must lie in [0, 30]");
                   },
                   [&](ShapeUnion const& u) {
                       for (auto const& part : u.parts)
                       {
                           if (part.dim != s.dim)
                               throw InvalidArgument("union parts differ in dimension");
                           validate(part);
                       }
                   },
               },
               s.shape);
    auto bb = bounding_box(s);
    for (int i = 0; i < s.dim; ++i)
    {
        if (bb.lo[i] < -0.5 || bb.hi[i] > 0.5)
            throw InvalidArgument("shape must lie inside [-1/2, 1/2]^d");
    }
}

bool meets_cube(ShapeSpec const& s, std::span<double const> lo,
                std::span<double const> hi)
{
    int const d = s.dim;
    return std::visit(
        Overloaded{
            [&](Ball const& b) {
                double sq = 0;
                for (int i = 0; i < d; ++i)
                {
                    double const gap
                        = std::max({lo[i] - b.center[i], 0.0, b.center[i] - hi[i]});
                    sq += gap * gap;
                }
                return sq <= b.radius * b.radius;
            },
            [&](Segment const& g) { return segment_meets(g, lo, hi); },
            [&](AxisBox const& b) {
                for (int i = 0; i < d; ++i)
                {
                    if (b.hi[i] < lo[i] || b.lo[i] > hi[i])
                        return false;
                }
                return true;
            },
            [&](CantorSet const& c) {
                return cantor_meets(-0.5, 0.5, c.depth, lo[0], hi[0]);
            },
            [&](ShapeUnion const& u) {
                return std::any_of(u.parts.begin(), u.parts.end(),
                                   [&](auto const& p) { return meets_cube(p, lo, hi); });
            },
        },
        s.shape);
}

PointSet discretize_cells(ShapeSpec const& s, int k)
{
    validate(s);
    if (k < 0 || k > 40)
        throw InvalidArgument("discretization level must lie in [0, 40]");
    int const d = s.dim;
    double const scale = std::ldexp(1.0, k);
    double const inv = std::ldexp(1.0, -k);
    auto bb = bounding_box(s);
    LatticePoint::Coords first{};
    LatticePoint::Coords last{};
    double count = 1;
    for (int i = 0; i < d; ++i)
    {
        first[i] = static_cast<std::int64_t>(std::ceil(bb.lo[i] * scale - 2));
        last[i] = static_cast<std::int64_t>(std::floor(bb.hi[i] * scale + 2));
        count *= static_cast<double>(last[i] - first[i] + 1);
    }
    if (count > 1e8)
        throw BudgetExceeded("discretization grid too large");

    std::vector<LatticePoint> cells;
    LatticePoint::Coords c = first;
    std::vector<double> lo(d);
    std::vector<double> hi(d);
    for (;;)
    {
        for (int i = 0; i < d; ++i)
        {
            lo[i] = static_cast<double>(c[i] - 2) * inv;
            hi[i] = static_cast<double>(c[i] + 2) * inv;
        }
        if (meets_cube(s, lo, hi))
            cells.emplace_back(std::span<std::int64_t const>(c.data(), d));
        int a = d - 1;
        for (; a >= 0; --a)
        {
            if (c[a] < last[a])
            {
                ++c[a];
                break;
            }
            c[a] = first[a];
        }
        if (a < 0)
            break;
    }
    return PointSet(d, std::move(cells));
}

PointSet discretize_shape(ShapeSpec const& s, int k)
{
    PointSet const cells = discretize_cells(s, k);
    int const d = s.dim;
    // Offsets {-2..2}^d.
    std::vector<LatticePoint> offsets;
    LatticePoint::Coords o{};
    std::fill_n(o.begin(), d, -2);
    for (;;)
    {
        offsets.emplace_back(std::span<std::int64_t const>(o.data(), d));
        int a = d - 1;
        for (; a >= 0; --a)
        {
            if (o[a] < 2)
            {
                ++o[a];
                break;
            }
            o[a] = -2;
        }
        if (a < 0)
            break;
    }
    return minkowski_sum(cells, PointSet(d, std::move(offsets)));
}

//---------------------------------------------------------------------------//
ShapeSpec parse_shape(std::string_view text)
{
    auto [kind, rest] = split_once(text, ':');
    ShapeSpec out;
    if (kind == "point")
    {
        out = ShapeSpec::point(parse_coords(rest));
    }
    else if (kind == "ball")
    {
        auto [c, r] = split_once(rest, ';');
        out = ShapeSpec::ball(parse_coords(c), parse_double(r));
    }
    else if (kind == "segment")
    {
        auto [a, b] = split_once(rest, ';');
        out = ShapeSpec::segment(parse_coords(a), parse_coords(b));
    }
    else if (kind == "box")
    {
        auto [a, b] = split_once(rest, ';');
        out = ShapeSpec::box(parse_coords(a), parse_coords(b));
    }
    else if (kind == "cantor")
    {
        out = ShapeSpec::cantor(static_cast<int>(parse_double(rest)));
    }
    else if (kind == "union")
    {
        std::vector<ShapeSpec> parts;
        std::size_t pos = 0;
        while (pos <= rest.size())
        {
            auto bar = rest.find('|', pos);
            if (bar == std::string_view::npos)
                bar = rest.size();
            parts.push_back(parse_shape(rest.substr(pos, bar - pos)));
            pos = bar + 1;
        }
        out = ShapeSpec::union_of(std::move(parts));
    }
    else
    {
        throw ParseError("unknown shape kind '" + std::string(kind) + "'");
    }
    validate(out);
    return out;
}

std::string format_shape(ShapeSpec const& s)
{
    return std::visit(
        Overloaded{
            [&](Ball const& b) {
                if (b.radius == 0)
                    return "point:" + format_coords(b.center);
                return "ball:" + format_coords(b.center) + ";" + format_double(b.radius);
            },
            [&](Segment const& g) {
                return "segment:" + format_coords(g.from) + ";" + format_coords(g.to);
            },
            [&](AxisBox const& b) {
                return "box:" + format_coords(b.lo) + ";" + format_coords(b.hi);
            },
            [&](CantorSet const& c) { return "cantor:" + std::to_string(c.depth); },
            [&](ShapeUnion const& u) {
                std::string out = "union:";
                for (std::size_t i = 0; i < u.parts.size(); ++i)
                {
                    if (i)
                        out += '|';
                    out += format_shape(u.parts[i]);
                }
                return out;
            },
        },
        s.shape);
}

}  // namespace fracsum
