#include <doctest.h>

#include <cmath>
#include <random>

#include "fracsum/errors.hpp"
#include "fracsum/fractal.hpp"
#include "fracsum/rng.hpp"

using namespace fracsum;

TEST_CASE("leaf words and points are inverse bijections")
{
    for (int d = 1; d <= 3; ++d)
    {
        for (int k = 0; k <= 3; ++k)
        {
            std::uint64_t const n = std::uint64_t{1} << (d * k);
            LatticePoint prev;
            for (std::uint64_t i = 0; i < n; ++i)
            {
                auto const x = leaf_point(d, k, i);
                CHECK(CenteredCube(d, k).contains(x));
                CHECK(leaf_index(x, k) == i);
                auto const w = TreeWord::of_point(x, k);
                CHECK(w.index() == i);
                CHECK(TreeWord::of_leaf_index(d, k, i) == w);
                auto const blk = word_to_cube(w, k);
                CHECK(blk.side == 1);
                CHECK(blk.corner == x);
            }
        }
    }
}

TEST_CASE("words of one length tile the cube")
{
    int const d = 2;
    int const k = 4;
    for (int j = 0; j <= k; ++j)
    {
        std::vector<int> cover(std::size_t{1} << (d * k), 0);
        for (std::uint64_t w = 0; w < (std::uint64_t{1} << (d * j)); ++w)
        {
            auto const blk = word_to_cube(TreeWord::of_leaf_index(d, j, w), k);
            CHECK(blk.side == (std::int64_t{1} << (k - j)));
            for (auto const& x : CenteredCube(d, k).points())
                if (blk.contains(x))
                    ++cover[leaf_index(x, k)];
        }
        for (int c : cover)
            CHECK(c == 1);
    }
}

TEST_CASE("samples are deterministic and coins are path functions")
{
    PercolationParams const params{2, 0.6, 5};
    auto const a = sample(params, 99);
    auto const b = sample(params, 99);
    CHECK(a.survivors == b.survivors);
    CHECK_FALSE(a.survivors == sample(params, 100).survivors);
    for (auto const& x : a.survivors)
    {
        auto const w = TreeWord::of_point(x, params.level);
        for (std::size_t j = 1; j <= w.length(); ++j)
            CHECK(edge_open(99, w.prefix(j).letters(), params.p));
    }
    // Every leaf whose full path is open survives.
    std::size_t open_leaves = 0;
    for (auto const& x : CenteredCube(2, 5).points())
    {
        auto const w = TreeWord::of_point(x, params.level);
        bool open = true;
        for (std::size_t j = 1; j <= w.length() && open; ++j)
            open = edge_open(99, w.prefix(j).letters(), params.p);
        open_leaves += open ? 1 : 0;
    }
    CHECK(open_leaves == a.survivors.size());
}

TEST_CASE("pruned sampling keeps exactly the survivors that can reach the target")
{
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 40; ++trial)
    {
        int const d = 1 + trial % 2;
        int const k = 3 + trial % 4;
        PercolationParams const params{d, 0.7, k};
        std::vector<LatticePoint> pts;
        for (int i = 0; i < 3; ++i)
        {
            LatticePoint x(d);
            for (int j = 0; j < d; ++j)
                x = x.with(j, static_cast<std::int64_t>(gen() % 24) - 12);
            pts.push_back(x);
        }
        PointSet const target(d, pts);
        Box const partner = CenteredCube(d, 1 + trial % 3).box();
        auto const full = sample(params, 500 + trial);
        auto const pruned = sample_pruned(params, 500 + trial, target, partner);
        CHECK(pruned.is_pruned());
        std::vector<LatticePoint> expected;
        for (auto const& x : full.survivors)
        {
            Box const reach = partner.shifted(x);
            bool meets = false;
            for (auto const& a : target)
                meets = meets || reach.contains(a);
            if (meets)
                expected.push_back(x);
        }
        CHECK(pruned.survivors == PointSet(d, expected));

        auto const plain = sample_pruned(params, 500 + trial, target);
        bool const hit_full = [&] {
            for (auto const& a : target)
                if (full.survivors.contains(a))
                    return true;
            return false;
        }();
        CHECK(plain.survivors.empty() == !hit_full);
        CHECK(hits(params, 500 + trial, LeafTarget(d, k, target.points())) == hit_full);
    }
}

TEST_CASE("single-point probability is p^k and MC agrees with the exact oracle")
{
    PercolationParams const params{1, 0.7, 4};
    PointSet const a(1, {LatticePoint{-3}, LatticePoint{2}});
    double const exact = hit_probability_exact(params, a);
    int hits_count = 0;
    int const trials = 40000;
    LeafTarget const t(1, 4, a.points());
    for (int i = 0; i < trials; ++i)
        hits_count += hits(params, rng::derive(7, i), t) ? 1 : 0;
    double const freq = static_cast<double>(hits_count) / trials;
    CHECK(std::abs(freq - exact) < 4 * std::sqrt(exact * (1 - exact) / trials));

    double pk = 1;
    for (int i = 0; i < 4; ++i)
        pk *= 0.7;
    CHECK(hit_probability_exact(params, PointSet(1, {LatticePoint{0}})) == pk);
    // Points outside the cube are ignored.
    CHECK(hit_probability_exact(params, PointSet(1, {LatticePoint{100}})) == 0.0);
}

TEST_CASE("survival recursion and the full cube")
{
    auto const s = survival_recursion(2, 0.4, 6);
    CHECK(s[0] == 1.0);
    for (int k = 1; k <= 6; ++k)
    {
        CHECK(s[static_cast<std::size_t>(k)] == doctest::Approx(1 - std::pow(1 - 0.4 * s[k - 1], 4)));
        double const v = hit_probability_exact({2, 0.4, k}, CenteredCube(2, k).points());
        CHECK(v == doctest::Approx(s[static_cast<std::size_t>(k)]).epsilon(1e-13));
    }
}

TEST_CASE("pair probability heights and bound")
{
    PercolationParams const params{2, 0.5, 4};
    auto const same = pair_probability(params, LatticePoint{1, 1}, LatticePoint{1, 1});
    CHECK(same.height == 0);
    CHECK(same.exact == doctest::Approx(std::pow(0.5, 4)));
    auto const far = pair_probability(params, LatticePoint{-8, -8}, LatticePoint{7, 7});
    CHECK(far.height == 4);
    CHECK(far.exact <= far.bound);
    auto const near = pair_probability(params, LatticePoint{0, 0}, LatticePoint{1, 0});
    CHECK(near.height == 1);
    CHECK(near.exact <= near.bound);
    CHECK_THROWS_AS(pair_probability(params, LatticePoint{8, 0}, LatticePoint{0, 0}), InvalidArgument);
}

TEST_CASE("leaf chain: transition kernels are stochastic and the sampler fits them")
{
    PercolationParams const params{1, 0.6, 4};
    for (std::uint64_t i = 1; i < 16; ++i)
    {
        auto const m = chain_transition_kernel(params, i);
        for (std::uint64_t s = 0; s < m.states(); ++s)
        {
            double row = 0;
            for (std::uint64_t t = 0; t < m.states(); ++t)
                row += m(s, t);
            CHECK(row == doctest::Approx(1));
        }
    }
    CHECK(shared_prefix(params, 8) == 0);
    CHECK(shared_prefix(params, 1) == 3);
    auto const chain = leaf_chain(sample(params, 4));
    CHECK(chain.size() == 16);
    for (std::uint64_t i : {1u, 4u, 8u, 15u})
    {
        auto const r = chain_test(params, i, 4000, 17 + i);
        CHECK(r.p_value > 1e-4);
    }
    CHECK_THROWS_AS(leaf_chain(sample_pruned(params, 4, PointSet(1, {LatticePoint{0}}))),
                    InvalidArgument);
}

TEST_CASE("sample text round trip and validation")
{
    auto const s = sample({2, 0.7, 3}, 12);
    auto const back = parse_sample(format_sample(s));
    CHECK(back.survivors == s.survivors);
    CHECK(back.seed == 12);
    CHECK_THROWS_AS(sample({1, 1.0, 3}, 1), InvalidArgument);
    CHECK_THROWS_AS(sample({1, 0.5, -1}, 1), InvalidArgument);
    CHECK_THROWS_AS(sample({2, 0.5, 40}, 1), InvalidArgument);
}

TEST_CASE("rng streams")
{
    CHECK(rng::derive(1, {2, 3}) == rng::derive(rng::derive(1, 2), 3));
    CHECK(rng::derive(1, 2) != rng::derive(2, 1));
    rng::SplitMix64 a(5);
    rng::SplitMix64 b(5);
    for (int i = 0; i < 10; ++i)
        CHECK(a() == b());
    rng::SplitMix64 c(9);
    std::vector<int> counts(6, 0);
    for (int i = 0; i < 60000; ++i)
        ++counts[c.below(6)];
    for (int n : counts)
        CHECK(std::abs(n - 10000) < 500);
}
