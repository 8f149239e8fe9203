#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fracsum/capacity.hpp"
#include "fracsum/errors.hpp"
#include "fracsum/hitting.hpp"
#include "fracsum/stats.hpp"

using namespace fracsum;

namespace {

SumHitSpec spec(double p, double q, int m, int n, std::vector<std::int64_t> target)
{
    std::vector<LatticePoint> pts;
    for (auto t : target)
        pts.push_back(LatticePoint{t});
    return SumHitSpec{1, p, q, m, n, PointSet(1, pts)};
}

}  // namespace

TEST_CASE("exact enumeration golden values")
{
    CHECK(sum_hit_exact_enum(spec(0.6, 0.7, 1, 1, {0})).estimate == doctest::Approx(0.42).epsilon(1e-14));
    CHECK(sum_hit_exact_enum(spec(0.5, 0.5, 1, 1, {-1})).estimate
          == doctest::Approx(0.4375).epsilon(1e-14));
    CHECK(sum_hit_exact_enum(spec(0.6, 0.6, 2, 2, {0})).estimate
          == doctest::Approx(3145149.0 / 9765625.0).epsilon(1e-14));
    CHECK_THROWS_AS(sum_hit_exact_enum(SumHitSpec{1, 0.6, 0.6, 4, 4, PointSet(1, {LatticePoint{0}})}),
                    BudgetExceeded);
}

TEST_CASE("difference-set test agrees with the direct Minkowski sum")
{
    auto const s = spec(0.7, 0.7, 2, 3, {-3, 1, 2});
    for (std::uint64_t t = 0; t < 300; ++t)
    {
        auto const q = sample(s.first(), first_seed(9, t)).survivors;
        auto const r = sample(s.second(), second_seed(9, t)).survivors;
        bool const direct = sum_meets_target(q, r, s.target);
        bool via_difference = false;
        for (auto const& a : s.target)
            for (auto const& y : r)
                via_difference = via_difference || q.contains(a - y);
        CHECK(direct == via_difference);
    }
}

TEST_CASE("MC, RB and exact agree; RB has smaller variance")
{
    auto const s = spec(0.6, 0.7, 2, 2, {-1, 0});
    double const exact = sum_hit_exact_enum(s).estimate;
    auto const mc = sum_hit_mc(s, 20000, 3);
    auto const rb = sum_hit_rao_blackwell(s, 20000, 3);
    CHECK(mc.interval(stats::kZ999).contains(exact));
    CHECK(rb.interval(stats::kZ999).contains(exact));
    CHECK(rb.variance <= mc.variance);
    CHECK(mc.ci_low <= mc.estimate);
    CHECK(mc.estimate <= mc.ci_high);
}

TEST_CASE("estimates do not depend on the worker count")
{
    auto const s = spec(0.6, 0.6, 3, 5, {-2, 2});
    RunOptions one;
    one.workers = 1;
    one.chunk_trials = 512;
    RunOptions four = one;
    four.workers = 4;
    auto const a = sum_hit_mc(s, 5000, 11, one);
    auto const b = sum_hit_mc(s, 5000, 11, four);
    CHECK(a.successes == b.successes);
    auto const c = sum_hit_rao_blackwell(s, 5000, 11, one);
    auto const d = sum_hit_rao_blackwell(s, 5000, 11, four);
    CHECK(c.estimate == d.estimate);
}

TEST_CASE("Paley-Zygmund bound is a lower bound and tight on a singleton")
{
    auto const single = spec(0.6, 0.7, 1, 1, {0});
    auto const pz = paley_zygmund(single, Measure::uniform(single.target));
    CHECK(pz.bound == doctest::Approx(0.42).epsilon(1e-14));
    CHECK(pz.first_moment == doctest::Approx(0.42));
    for (auto const& s : {spec(0.6, 0.7, 1, 2, {-1, 0}), spec(0.55, 0.8, 2, 2, {-2, 1}),
                          spec(0.6, 0.7, 2, 2, {-1})})
    {
        double const exact = sum_hit_exact_enum(s).estimate;
        CHECK(paley_zygmund_bound(s, Measure::uniform(s.target)) <= exact * (1 + 1e-12));
        CHECK(paley_zygmund_bound(s, capacity(s.target, s.beta()).equilibrium) <= exact * (1 + 1e-12));
    }
}

TEST_CASE("spec validation and helpers")
{
    auto const s = spec(0.6, 0.6, 2, 3, {0});
    CHECK(s.beta() == doctest::Approx(-std::log2(2 * 0.36)));
    auto const box = s.extended_box();
    CHECK(box.lo == LatticePoint{-6});
    CHECK(box.hi == LatticePoint{5});
    CHECK_THROWS_AS(spec(0.6, 0.6, 3, 2, {0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(spec(0.6, 0.6, 1, 1, {9}).validate(), InvalidArgument);
    CHECK(edge_count(1, 2) == 6);
    CHECK(edge_count(2, 1) == 4);
    CHECK(target_hash(s.target) == target_hash(PointSet(1, {LatticePoint{0}})));
    CHECK(target_hash(s.target) != target_hash(PointSet(1, {LatticePoint{1}})));
    auto const row = hit_csv_row(s, sum_hit_exact_enum(spec(0.6, 0.6, 1, 1, {0})));
    auto const header = hit_csv_header();
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
    CHECK(parse_estimate_method("rb") == EstimateMethod::rao_blackwell);
}

TEST_CASE("statistics helpers")
{
    auto const w = stats::wilson(0, 100, stats::kZ95);
    CHECK(w.low == 0);
    CHECK(w.high > 0);
    auto const half = stats::wilson(50, 100, stats::kZ95);
    CHECK(half.contains(0.5));
    CHECK(half.low == doctest::Approx(1 - half.high));
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y{3, 5, 7, 9};
    CHECK(stats::ols_slope(x, y) == doctest::Approx(2));
    CHECK(stats::band(std::vector<double>{1, 4, 2}) == 4);
    CHECK(std::isinf(stats::band(std::vector<double>{1, 0})));
    CHECK(stats::chi_square_sf(0, 3) == doctest::Approx(1));
    CHECK(stats::chi_square_sf(7.814727903, 3) == doctest::Approx(0.05).epsilon(1e-6));
}
