#include <doctest.h>

#include "fracsum/capacity.hpp"
#include "fracsum/errors.hpp"
#include "fracsum/randomsets.hpp"
#include "fracsum/rng.hpp"

using namespace fracsum;

TEST_CASE("walk ranges stay in the ball and are coupled across radii")
{
    auto const small = RandomSetSpec::srw_range(3, 6);
    auto const large = RandomSetSpec::srw_range(3, 12);
    for (std::uint64_t seed = 0; seed < 30; ++seed)
    {
        auto const a = sample_srw_range(small, seed);
        auto const b = sample_srw_range(large, seed);
        CHECK(a.contains(LatticePoint(3)));
        for (auto const& x : a)
            CHECK(norm(x) <= 6.0);
        CHECK(a.is_subset_of(b));
        CHECK(sample_srw_range(small, seed) == a);
    }
}

TEST_CASE("walk ranges respect the start point and the step budget")
{
    auto spec = RandomSetSpec::srw_range(3, 4, LatticePoint{10, 0, 0});
    auto const r = sample_srw_range(spec, 1);
    CHECK(r.contains(LatticePoint{10, 0, 0}));
    spec.srw.max_steps = 2;
    spec.srw.radius = 1000;
    CHECK_THROWS_AS(sample_srw_range(spec, 1), BudgetExceeded);
}

TEST_CASE("exponents and thresholds")
{
    auto const w = RandomSetSpec::srw_range(5, 64);
    CHECK(w.alpha == 3);
    CHECK(w.beta == 3);
    CHECK(sum_exponent(w, w) == 1);
    auto const f = RandomSetSpec::fractal_percolation({2, 0.5, 4});
    CHECK(f.alpha == doctest::Approx(1));
    PointSet const a(5, {LatticePoint(5), LatticePoint::axis(5, 0, 2)});
    double const th = sum_radius_threshold(w, w, a);
    CHECK(th >= 4);
    CHECK_THROWS_AS(sum_of_ranges_hit(w, w, a, {LatticePoint::axis(5, 0, 1)}, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(RandomSetSpec::srw_range(4, 8).validate(5), InvalidArgument);
    RandomSetSpec brw;
    brw.kind = RandomSetKind::branching_rw;
    CHECK_THROWS_AS(brw.validate(), InvalidArgument);
    CHECK(parse_random_set_kind("srw") == RandomSetKind::srw_range);
}

TEST_CASE("single range hit probability decays like |x|^{2-d}")
{
    auto const spec = RandomSetSpec::srw_range(3, 160);
    PointSet const a(3, {LatticePoint(3)});
    auto const table = single_set_hit_check(spec, a, {LatticePoint{5, 0, 0}, LatticePoint{20, 0, 0}},
                                            3000, 5);
    REQUIRE(table.rows.size() == 2);
    for (auto const& row : table.rows)
    {
        CHECK(row.estimate.estimate > 0);
        CHECK(row.reference == doctest::Approx(1 / row.norm));
    }
    CHECK(table.band < 4);
}

TEST_CASE("sum of two fractal sets delegates to the percolation estimator")
{
    // Needs 0 < alpha_1 + alpha_2 - d and beta < d, so d = 2 and 1/4 < p < 1/2.
    auto const f1 = RandomSetSpec::fractal_percolation({2, 0.4, 1});
    auto const f2 = RandomSetSpec::fractal_percolation({2, 0.45, 2});
    PointSet const a(2, {LatticePoint{0, 0}});
    auto const t = sum_of_ranges_hit(f1, f2, a, {LatticePoint{1, 0}}, 20000, 3);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].estimate.estimate > 0);
    CHECK(t.rows[0].estimate.estimate < 1);
}

TEST_CASE("one sum trial matches the direct Minkowski test")
{
    auto const w1 = RandomSetSpec::srw_range(5, 5);
    auto const w2 = RandomSetSpec::srw_range(5, 4);
    PointSet const target(5, {LatticePoint::axis(5, 0, 3), LatticePoint{3, 1, 0, 0, 0}});
    int hits = 0;
    for (std::uint64_t s = 0; s < 200; ++s)
    {
        auto const r1 = sample_srw_range(w1, rng::derive(s, 2));
        auto const r2 = sample_srw_range(w2, rng::derive(s, 1));
        bool const direct = sum_meets_target(r1, r2, target);
        CHECK(sum_hits_once(w1, w2, target, s) == direct);
        hits += direct ? 1 : 0;
    }
    CHECK(hits > 0);
}
