#include <doctest.h>

#include <algorithm>
#include <random>

#include "fracsum/capacity.hpp"
#include "fracsum/errors.hpp"
#include "fracsum/shapes.hpp"

using namespace fracsum;

namespace {

PointSet random_set(std::mt19937_64& gen, int d, int n, int span)
{
    std::vector<LatticePoint> pts;
    for (int i = 0; i < n; ++i)
    {
        LatticePoint x(d);
        for (int j = 0; j < d; ++j)
            x = x.with(j, static_cast<std::int64_t>(gen() % (2 * span + 1)) - span);
        pts.push_back(x);
    }
    return PointSet(d, pts);
}

}  // namespace

TEST_CASE("kernel clamps at distance one")
{
    Kernel const k(1.5);
    CHECK(k(LatticePoint{0}, LatticePoint{0}) == 1.0);
    CHECK(k(LatticePoint{0}, LatticePoint{1}) == 1.0);
    CHECK(k(LatticePoint{0}, LatticePoint{4}) == doctest::Approx(0.125));
}

TEST_CASE("golden capacities")
{
    auto const single = capacity(PointSet(2, {LatticePoint{3, 3}}), 0.7);
    CHECK(single.value == 1.0);
    CHECK(single.method == CapacityMethod::analytic);

    auto const pair = capacity(PointSet(1, {LatticePoint{0}, LatticePoint{4}}), 1.0);
    CHECK(pair.value == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(pair.equilibrium.weight(0) == doctest::Approx(0.5));

    // Middle point carries no mass: its potential under (1/2, 0, 1/2) is 1,
    // above the 3/4 at the end points.
    auto const three = capacity(PointSet(1, {LatticePoint{0}, LatticePoint{1}, LatticePoint{2}}), 1.0);
    CHECK(three.value == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(three.equilibrium.weight(1) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("equilibrium satisfies the first-order conditions")
{
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 40; ++trial)
    {
        int const d = 1 + trial % 3;
        auto const a = random_set(gen, d, 2 + static_cast<int>(gen() % 20), 6);
        double const beta = 0.5 + 0.25 * static_cast<double>(trial % 7);
        auto const r = capacity(a, beta);
        REQUIRE(r.converged);
        auto const u = potentials(r.equilibrium, beta);
        double const e = r.energy;
        CHECK(r.value == doctest::Approx(1 / e));
        CHECK(energy(r.equilibrium, beta) == doctest::Approx(e).epsilon(1e-9));
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            // Potential >= energy everywhere, equal on the support.
            CHECK(u[i] >= e * (1 - 1e-6));
            if (r.equilibrium.weight(i) > 1e-9)
                CHECK(u[i] == doctest::Approx(e).epsilon(1e-6));
        }
    }
}

TEST_CASE("capacity properties: bounds, monotonicity, subadditivity, translation")
{
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 60; ++trial)
    {
        int const d = 1 + trial % 2;
        double const beta = trial % 3 == 0 ? 0.5 : (trial % 3 == 1 ? 1.0 : 2.0);
        auto const a = random_set(gen, d, 1 + static_cast<int>(gen() % 8), 5);
        auto const b = random_set(gen, d, 1 + static_cast<int>(gen() % 8), 5);
        double const ca = capacity(a, beta).value;
        double const cb = capacity(b, beta).value;
        double const cab = capacity(a.united(b), beta).value;
        CHECK(ca >= 1 - 1e-9);
        CHECK(ca <= static_cast<double>(a.size()) + 1e-9);
        CHECK(cab >= std::max(ca, cb) * (1 - 1e-7));
        CHECK(cab <= (ca + cb) * (1 + 1e-7));
        LatticePoint shift(d);
        shift = shift.with(0, 17);
        CHECK(capacity(a.translated(shift), beta).value == doctest::Approx(ca).epsilon(1e-10));
    }
}

TEST_CASE("fast solver agrees with the grid oracle")
{
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 30; ++trial)
    {
        auto const a = random_set(gen, 1 + trial % 2, 1 + static_cast<int>(gen() % 5), 4);
        for (double beta : {0.5, 1.0, 2.0})
        {
            double const fast = capacity(a, beta).value;
            double const slow = capacity_bruteforce(a, beta, 1e-3).value;
            CHECK(std::abs(fast - slow) <= 5e-3);
            CHECK(slow <= fast * (1 + 1e-9));
        }
    }
    CHECK_THROWS_AS(capacity_bruteforce(CenteredCube(1, 3).points(), 1.0, 1e-3), InvalidArgument);
}

// Plain Frank-Wolfe stalls at a local minimum on these; values from an
// exhaustive KKT solve over all faces.
TEST_CASE("indefinite kernels reach the global minimum")
{
    auto const line = capacity(PointSet(1, {LatticePoint{-4}, LatticePoint{-1}, LatticePoint{1},
                                            LatticePoint{2}, LatticePoint{4}}),
                               2.0);
    CHECK(line.value == doctest::Approx(3.149768192969706).epsilon(1e-12));
    CHECK(line.equilibrium.weight_of(LatticePoint{2}) == 0.0);

    auto const plane = capacity(PointSet(2, {LatticePoint{0, -4}, LatticePoint{0, 1}, LatticePoint{1, 0},
                                             LatticePoint{2, 0}, LatticePoint{2, 1}}),
                                2.0);
    CHECK(plane.value == doctest::Approx(2.5361062170650484).epsilon(1e-12));

    // 14 points, past exhaustive search; optimum is every other point.
    std::vector<LatticePoint> gapped;
    for (std::int64_t x : {-8, -7, -6, -5, -4, -3, -2, -1, 0, 3, 4, 5, 6, 7})
        gapped.push_back(LatticePoint{x});
    CHECK(capacity(PointSet(1, gapped), 2.0).value
          == doctest::Approx(5.2475030099188675).epsilon(1e-10));

    // Past the enumeration limit: a local minimum would show up as a subset
    // with larger capacity.
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 5; ++trial)
    {
        std::vector<std::int64_t> xs;
        for (std::int64_t x = -10; x <= 10; ++x)
            xs.push_back(x);
        std::shuffle(xs.begin(), xs.end(), gen);
        std::vector<LatticePoint> pts;
        for (int i = 0; i < 14; ++i)
            pts.push_back(LatticePoint{xs[static_cast<std::size_t>(i)]});
        PointSet const a(1, pts);
        auto const full = capacity(a, 2.0);
        CHECK(full.method == CapacityMethod::frank_wolfe);
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            std::vector<LatticePoint> rest;
            for (std::size_t j = 0; j < a.size(); ++j)
            {
                if (j != i)
                    rest.push_back(a[j]);
            }
            CHECK(capacity(PointSet(1, rest), 2.0).value <= full.value * (1 + 1e-9));
        }
    }
}

TEST_CASE("large indefinite kernels go through Frank-Wolfe")
{
    auto const cube = CenteredCube(2, 4).points();
    auto const r = capacity(cube, 1.0);
    CHECK(r.converged);
    CHECK(r.method != CapacityMethod::analytic);
    CHECK(r.value > 1);
    CHECK(r.value < static_cast<double>(cube.size()));
}

TEST_CASE("iteration cap raises with the best iterate")
{
    CapacityOptions opt;
    opt.max_iterations = 1;
    opt.tol = 1e-14;
    try
    {
        capacity(CenteredCube(2, 3).points(), 1.0, opt);
        CHECK(true);  // an exact solve path may finish without iterating
    }
    catch (CapacityNotConverged const& e)
    {
        CHECK(e.best().value > 0);
        CHECK_FALSE(e.best().converged);
    }
}

TEST_CASE("capacity result text round trip")
{
    auto const r = capacity(PointSet(1, {LatticePoint{0}, LatticePoint{4}, LatticePoint{9}}), 0.8);
    auto const back = parse_capacity_result(format_capacity_result(r));
    CHECK(back.value == r.value);
    CHECK(back.equilibrium.support() == r.equilibrium.support());
    CHECK(back.method == r.method);
}

TEST_CASE("measures validate")
{
    PointSet const s(1, {LatticePoint{0}, LatticePoint{1}});
    CHECK_THROWS_AS(Measure(s, {0.5, 0.6}), InvalidArgument);
    CHECK_THROWS_AS(Measure(s, {1.5, -0.5}), InvalidArgument);
    CHECK(Measure::uniform(s).weight_of(LatticePoint{1}) == 0.5);
    CHECK(Measure::dirac(1, LatticePoint{2}).weight(0) == 1.0);
}

TEST_CASE("shapes discretize into growing lattice sets")
{
    auto const seg = ShapeSpec::segment({-0.125, -0.125}, {0.125, 0.125});
    auto const s4 = discretize_shape(seg, 4);
    auto const s6 = discretize_shape(seg, 6);
    CHECK(s4.size() < s6.size());
    CHECK(s6.contains(LatticePoint{0, 0}));
    auto const ball = parse_shape("ball:0,0;0.25");
    CHECK(format_shape(parse_shape(format_shape(ball))) == format_shape(ball));
    CHECK_THROWS_AS(validate(ShapeSpec::ball({0.4}, 0.3)), InvalidArgument);
    CHECK(discretize_shape(ShapeSpec::cantor(2), 5).size() > 0);
}
