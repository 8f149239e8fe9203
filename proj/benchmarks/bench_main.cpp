#include <benchmark/benchmark.h>

#include "fracsum/capacity.hpp"
#include "fracsum/fractal.hpp"
#include "fracsum/hitting.hpp"
#include "fracsum/randomsets.hpp"

using namespace fracsum;

namespace {

void BM_SampleFull(benchmark::State& state)
{
    PercolationParams const params{2, 0.6, static_cast<int>(state.range(0))};
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample(params, ++seed).survivors.size());
}
BENCHMARK(BM_SampleFull)->DenseRange(4, 10, 2);

void BM_SamplePruned(benchmark::State& state)
{
    PercolationParams const params{2, 0.6, static_cast<int>(state.range(0))};
    PointSet const target(2, {LatticePoint{0, 0}, LatticePoint{3, -2}});
    Box const partner = CenteredCube(2, 2).box();
    std::uint64_t seed = 0;
    std::vector<LatticePoint> out;
    for (auto _ : state)
    {
        out.clear();
        collect_pruned_survivors(params, ++seed, target.points(), partner, out);
        benchmark::DoNotOptimize(out.size());
    }
}
BENCHMARK(BM_SamplePruned)->DenseRange(4, 10, 2);

void BM_ExactHitCube(benchmark::State& state)
{
    int const k = static_cast<int>(state.range(0));
    PointSet const cube = CenteredCube(2, k).points();
    for (auto _ : state)
        benchmark::DoNotOptimize(hit_probability_exact({2, 0.6, k}, cube));
}
BENCHMARK(BM_ExactHitCube)->DenseRange(4, 8, 2);

void BM_Capacity(benchmark::State& state)
{
    int const k = static_cast<int>(state.range(0));
    PointSet const cube = CenteredCube(2, k).points();
    for (auto _ : state)
        benchmark::DoNotOptimize(capacity(cube, 1.0).value);
    state.counters["points"] = static_cast<double>(cube.size());
}
BENCHMARK(BM_Capacity)->DenseRange(2, 5, 1)->Unit(benchmark::kMillisecond);

void BM_SumHitMc(benchmark::State& state)
{
    int const m = static_cast<int>(state.range(0));
    SumHitSpec const spec{1, 0.6, 0.6, m, 8, PointSet(1, {LatticePoint{-2}, LatticePoint{2}})};
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sum_hit_mc(spec, 1000, ++seed).estimate);
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SumHitMc)->DenseRange(1, 4, 1)->Unit(benchmark::kMillisecond);

void BM_SumHitRaoBlackwell(benchmark::State& state)
{
    int const m = static_cast<int>(state.range(0));
    SumHitSpec const spec{1, 0.6, 0.6, m, 8, PointSet(1, {LatticePoint{-2}, LatticePoint{2}})};
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sum_hit_rao_blackwell(spec, 1000, ++seed).estimate);
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SumHitRaoBlackwell)->DenseRange(1, 4, 1)->Unit(benchmark::kMillisecond);

void BM_ExactEnum(benchmark::State& state)
{
    SumHitSpec const spec{1, 0.6, 0.7, 2, 2, PointSet(1, {LatticePoint{-1}, LatticePoint{0}})};
    for (auto _ : state)
        benchmark::DoNotOptimize(sum_hit_exact_enum(spec).estimate);
}
BENCHMARK(BM_ExactEnum);

void BM_WalkRange(benchmark::State& state)
{
    auto const spec = RandomSetSpec::srw_range(5, static_cast<double>(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_srw_range(spec, ++seed).size());
}
BENCHMARK(BM_WalkRange)->Arg(16)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
