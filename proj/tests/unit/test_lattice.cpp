#include <doctest.h>

#include <random>

#include "fracsum/errors.hpp"
#include "fracsum/lattice.hpp"
#include "fracsum/text_format.hpp"

using namespace fracsum;

TEST_CASE("points: arithmetic, ordering and overflow")
{
    LatticePoint const a{1, -2};
    LatticePoint const b{3, 4};
    CHECK(a + b == LatticePoint{4, 2});
    CHECK(b - a == LatticePoint{2, 6});
    CHECK(-a == LatticePoint{-1, 2});
    CHECK(a.scaled(3) == LatticePoint{3, -6});
    CHECK(a < b);
    CHECK(squared_distance(a, b) == 40);
    CHECK(LatticePoint::axis(3, 1, 7) == LatticePoint{0, 7, 0});
    CHECK_THROWS_AS((LatticePoint{1} + LatticePoint{1, 2}), DimensionMismatch);
    auto const big = LatticePoint::filled(1, std::numeric_limits<std::int64_t>::max());
    CHECK_THROWS_AS(big + LatticePoint{1}, OverflowError);
}

TEST_CASE("point sets sort, deduplicate and index")
{
    PointSet const s(1, {LatticePoint{3}, LatticePoint{-1}, LatticePoint{3}, LatticePoint{0}});
    REQUIRE(s.size() == 3);
    CHECK(s[0] == LatticePoint{-1});
    CHECK(s.contains(LatticePoint{0}));
    CHECK_FALSE(s.contains(LatticePoint{1}));
    CHECK(s.index_of(LatticePoint{3}) == 2u);
    CHECK(s.squared_diameter() == 16);
    CHECK(s.diameter() == doctest::Approx(4));
    CHECK(s.bbox().lo == LatticePoint{-1});
    CHECK_THROWS_AS(PointSet(1).bbox(), InvalidArgument);
}

TEST_CASE("minkowski sums against brute force")
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 50; ++trial)
    {
        int const d = 1 + trial % 3;
        auto random_set = [&](int n) {
            std::vector<LatticePoint> pts;
            for (int i = 0; i < n; ++i)
            {
                LatticePoint x(d);
                for (int j = 0; j < d; ++j)
                    x = x.with(j, static_cast<std::int64_t>(gen() % 9) - 4);
                pts.push_back(x);
            }
            return PointSet(d, pts);
        };
        auto const a = random_set(1 + static_cast<int>(gen() % 6));
        auto const b = random_set(1 + static_cast<int>(gen() % 6));
        auto const sum = minkowski_sum(a, b);
        for (auto const& x : a)
            for (auto const& y : b)
                CHECK(sum.contains(x + y));
        std::size_t count = 0;
        for (auto const& z : sum)
        {
            bool found = false;
            for (auto const& x : a)
                found = found || b.contains(z - x);
            count += found ? 1 : 0;
        }
        CHECK(count == sum.size());
        CHECK(minkowski_difference(a, b) == minkowski_sum(a, negate(b)));
        CHECK(minkowski_sum(a, b) == minkowski_sum(b, a));
    }
}

TEST_CASE("centered cubes")
{
    CenteredCube const c0(2, 0);
    CHECK(c0.size() == 1);
    CHECK(c0.contains(LatticePoint{0, 0}));
    CenteredCube const c3(1, 3);
    CHECK(c3.low() == -4);
    CHECK(c3.high() == 3);
    CHECK(c3.points().size() == 8);
    CHECK_FALSE(c3.contains(LatticePoint{4}));
    CHECK(CenteredCube(3, 2).points().size() == 64);
}

TEST_CASE("hash set keeps insertion order")
{
    PointHashSet h;
    for (int i = 0; i < 1000; ++i)
        h.insert(LatticePoint{i % 300, 1});
    CHECK(h.size() == 300);
    CHECK(h.items()[5] == LatticePoint{5, 1});
    CHECK(h.contains(LatticePoint{299, 1}));
    CHECK_FALSE(h.contains(LatticePoint{300, 1}));
}

TEST_CASE("box algebra")
{
    Box const a{LatticePoint{-1, 0}, LatticePoint{1, 2}};
    Box const b{LatticePoint{0, 0}, LatticePoint{3, 0}};
    Box const s = a + b;
    CHECK(s.lo == LatticePoint{-1, 0});
    CHECK(s.hi == LatticePoint{4, 2});
    CHECK(a.volume() == 9);
    CHECK(a.intersects(b));
    CHECK(a.negated().hi == LatticePoint{1, 0});
}

TEST_CASE("point-set text format round trip")
{
    PointSet const s(2, {LatticePoint{0, 0}, LatticePoint{-3, 4}});
    CHECK(parse_point_set(format_point_set(s)) == s);
    auto const parsed = parse_point_set("# comment\nd=2\n 1 2 # trailing\n\n3 4\n");
    CHECK(parsed.size() == 2);
    CHECK_THROWS_AS(parse_point_set("d=2\n1 2 3\n"), ParseError);
    CHECK_THROWS_AS(parse_point_set("1 2\n"), ParseError);
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5})
        CHECK(parse_double(format_double(v)) == v);
}
