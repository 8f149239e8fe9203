#include "fracsum/hitting.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "fracsum/errors.hpp"
#include "fracsum/parallel.hpp"
#include "fracsum/rng.hpp"
#include "fracsum/text_format.hpp"

namespace fracsum {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Per-worker scratch for one trial.
struct TrialScratch
{
    std::vector<LatticePoint> second;
    LeafTarget differences;

    TrialScratch(int d, int m) : differences(d, m) {}
};

class TrialRunner
{
  public:
    explicit TrialRunner(SumHitSpec const& spec)
        : spec_(spec),
          first_(spec.first()),
          second_(spec.second()),
          partner_(CenteredCube(spec.d, spec.m).box())
    {
    }

    // Builds D = (target - Q') ∩ Delta_m in scratch.differences.
    void prepare(std::uint64_t seed, std::uint64_t trial, TrialScratch& s) const
    {
        s.second.clear();
        collect_pruned_survivors(second_, second_seed(seed, trial),
                                 spec_.target.points(), partner_, s.second);
        s.differences.clear();
        for (auto const& a : spec_.target)
        {
            for (auto const& b : s.second)
                s.differences.insert_unsorted(a - b);
        }
        s.differences.finalize();
    }

    bool binary(std::uint64_t seed, std::uint64_t trial, TrialScratch& s) const
    {
        prepare(seed, trial, s);
        return hits(first_, first_seed(seed, trial), s.differences);
    }

    double conditional(std::uint64_t seed, std::uint64_t trial, TrialScratch& s) const
    {
        prepare(seed, trial, s);
        return hit_probability_exact(first_, s.differences);
    }

  private:
    SumHitSpec const& spec_;
    PercolationParams first_;
    PercolationParams second_;
    std::optional<Box> partner_;
};

std::size_t chunk_count(std::uint64_t trials, std::size_t chunk)
{
    return static_cast<std::size_t>((trials + chunk - 1) / chunk);
}

//---------------------------------------------------------------------------//
// Distribution of the surviving leaf set of one tree: leaf bitmask -> prob.
std::map<std::uint64_t, double> survivor_law(int d, int level, double p)
{
    std::uint64_t const edges = edge_count(d, level);
    std::uint64_t const leaves = std::uint64_t{1} << (d * level);
    std::vector<std::uint64_t> offset(static_cast<std::size_t>(level) + 2, 0);
    for (int j = 1; j <= level; ++j)
        offset[static_cast<std::size_t>(j) + 1] = offset[static_cast<std::size_t>(j)] + (std::uint64_t{1} << (d * j));

    std::map<std::uint64_t, stats::CompensatedSum> acc;
    std::vector<std::uint8_t> open_prev;
    std::vector<std::uint8_t> open_cur;
    std::vector<double> pow_p(edges + 1);
    std::vector<double> pow_q(edges + 1);
    for (std::uint64_t e = 0; e <= edges; ++e)
    {
        pow_p[e] = std::pow(p, static_cast<double>(e));
        pow_q[e] = std::pow(1 - p, static_cast<double>(e));
    }
    for (std::uint64_t config = 0; config < (std::uint64_t{1} << edges); ++config)
    {
        open_prev.assign(1, 1);
        for (int j = 1; j <= level; ++j)
        {
            std::uint64_t const count = std::uint64_t{1} << (d * j);
            open_cur.assign(count, 0);
            for (std::uint64_t idx = 0; idx < count; ++idx)
            {
                bool const edge = (config >> (offset[static_cast<std::size_t>(j)] + idx)) & 1u;
                open_cur[idx] = edge && open_prev[idx >> d];
            }
            open_prev.swap(open_cur);
        }
        std::uint64_t mask = 0;
        for (std::uint64_t leaf = 0; leaf < leaves; ++leaf)
        {
            if (open_prev[leaf])
                mask |= std::uint64_t{1} << leaf;
        }
        auto const ones = static_cast<std::uint64_t>(std::popcount(config));
        acc[mask].add(pow_p[ones] * pow_q[edges - ones]);
    }
    std::map<std::uint64_t, double> out;
    for (auto const& [mask, s] : acc)
        out[mask] = s.value();
    return out;
}

}  // namespace

//---------------------------------------------------------------------------//
double SumHitSpec::beta() const noexcept
{
    return -std::log2(std::ldexp(p * q, d));
}

bool SumHitSpec::parameters_valid() const noexcept
{
    double const floor = std::ldexp(1.0, -d);
    return beta() > 0 && p > floor && q > floor;
}

Box SumHitSpec::extended_box() const
{
    std::int64_t const half_n = n == 0 ? 0 : std::int64_t{1} << (n - 1);
    std::int64_t const half_m = m == 0 ? 0 : std::int64_t{1} << (m - 1);
    std::int64_t const reach = half_n + half_m;
    // Half-open [-reach, reach) unless both cubes are Delta_0.
    std::int64_t const hi = reach == 0 ? 0 : reach - 1;
    return {LatticePoint::filled(d, -reach), LatticePoint::filled(d, hi)};
}

void SumHitSpec::validate() const
{
    first().validate();
    second().validate();
    if (m < 0 || m > n)
        throw InvalidArgument("levels must satisfy 0 <= m <= n");
    if (target.empty())
        throw InvalidArgument("target set must be nonempty");
    if (target.dim() != d)
        throw DimensionMismatch("target dimension does not match d");
    Box const box = extended_box();
    for (auto const& a : target)
    {
        if (!box.contains(a))
            throw InvalidArgument("target point outside the extended box "
                                  "[-2^{n-1}-2^{m-1}, 2^{n-1}+2^{m-1})^d");
    }
}

char const* to_string(EstimateMethod m)
{
    switch (m)
    {
        case EstimateMethod::mc:
            return "mc";
        case EstimateMethod::rao_blackwell:
            return "rb";
        case EstimateMethod::exact_enum:
            return "exact";
    }
    return "?";
}

EstimateMethod parse_estimate_method(std::string_view s)
{
    if (s == "mc")
        return EstimateMethod::mc;
    if (s == "rb" || s == "rao_blackwell")
        return EstimateMethod::rao_blackwell;
    if (s == "exact" || s == "exact_enum")
        return EstimateMethod::exact_enum;
    throw ParseError("unknown estimation method '" + std::string(s) + "'");
}

stats::Interval EstimateResult::interval(double z) const
{
    switch (method)
    {
        case EstimateMethod::mc:
            return stats::wilson(successes, trials, z);
        case EstimateMethod::rao_blackwell:
            return stats::mean_interval(estimate, variance, trials, z);
        case EstimateMethod::exact_enum:
            return {estimate, estimate};
    }
    return {estimate, estimate};
}

std::uint64_t first_seed(std::uint64_t run_seed, std::uint64_t trial)
{
    return rng::derive(run_seed, {trial, 2});
}

std::uint64_t second_seed(std::uint64_t run_seed, std::uint64_t trial)
{
    return rng::derive(run_seed, {trial, 1});
}

//---------------------------------------------------------------------------//
EstimateResult sum_hit_mc(SumHitSpec const& spec, std::uint64_t trials,
                          std::uint64_t seed, RunOptions const& options)
{
    spec.validate();
    if (trials < 1)
        throw InvalidArgument("need at least one trial");
    auto const start = Clock::now();
    TrialRunner const runner(spec);
    std::size_t const chunk = std::max<std::size_t>(1, options.chunk_trials);
    std::size_t const chunks = chunk_count(trials, chunk);
    std::vector<std::uint64_t> hits_per_chunk(chunks, 0);

    for_each_chunk(chunks, options.workers, [&](std::size_t c) {
        TrialScratch scratch(spec.d, spec.m);
        std::uint64_t const lo = c * chunk;
        std::uint64_t const hi = std::min<std::uint64_t>(trials, lo + chunk);
        std::uint64_t count = 0;
        for (std::uint64_t t = lo; t < hi; ++t)
            count += runner.binary(seed, t, scratch) ? 1 : 0;
        hits_per_chunk[c] = count;
    });

    EstimateResult r;
    for (auto h : hits_per_chunk)
        r.successes += h;
    r.trials = trials;
    r.estimate = static_cast<double>(r.successes) / static_cast<double>(trials);
    auto const ci = stats::wilson(r.successes, trials, stats::kZ95);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.variance = trials > 1 ? r.estimate * (1 - r.estimate) * static_cast<double>(trials)
                                  / static_cast<double>(trials - 1)
                            : 0.0;
    r.method = EstimateMethod::mc;
    r.seed = seed;
    r.elapsed_ms = elapsed_ms(start);
    return r;
}

EstimateResult sum_hit_rao_blackwell(SumHitSpec const& spec, std::uint64_t trials,
                                     std::uint64_t seed, RunOptions const& options)
{
    spec.validate();
    if (trials < 1)
        throw InvalidArgument("need at least one trial");
    if (spec.d * spec.m >= 63
        || (std::uint64_t{1} << (spec.d * spec.m)) > options.frontier_budget)
    {
        throw BudgetExceeded("Rao-Blackwell inner tree exceeds the frontier budget");
    }
    auto const start = Clock::now();
    TrialRunner const runner(spec);
    std::size_t const chunk = std::max<std::size_t>(1, options.chunk_trials);
    std::size_t const chunks = chunk_count(trials, chunk);
    std::vector<stats::CompensatedSum> sums(chunks);
    std::vector<stats::CompensatedSum> squares(chunks);

    for_each_chunk(chunks, options.workers, [&](std::size_t c) {
        TrialScratch scratch(spec.d, spec.m);
        std::uint64_t const lo = c * chunk;
        std::uint64_t const hi = std::min<std::uint64_t>(trials, lo + chunk);
        for (std::uint64_t t = lo; t < hi; ++t)
        {
            double const v = runner.conditional(seed, t, scratch);
            sums[c].add(v);
            squares[c].add(v * v);
        }
    });

    stats::CompensatedSum total;
    stats::CompensatedSum total_sq;
    for (std::size_t c = 0; c < chunks; ++c)
    {
        total.add(sums[c].value());
        total_sq.add(squares[c].value());
    }
    double const n = static_cast<double>(trials);
    EstimateResult r;
    r.trials = trials;
    r.estimate = std::clamp(total.value() / n, 0.0, 1.0);
    r.variance = trials > 1
                     ? std::max(0.0, (total_sq.value() - n * r.estimate * r.estimate) / (n - 1))
                     : 0.0;
    auto const ci = stats::mean_interval(r.estimate, r.variance, trials, stats::kZ95);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.method = EstimateMethod::rao_blackwell;
    r.seed = seed;
    r.elapsed_ms = elapsed_ms(start);
    return r;
}

std::uint64_t edge_count(int d, int level)
{
    std::uint64_t e = 0;
    for (int j = 1; j <= level; ++j)
    {
        if (d * j >= 62)
            throw OverflowError("edge count overflow");
        e += std::uint64_t{1} << (d * j);
    }
    return e;
}

EstimateResult sum_hit_exact_enum(SumHitSpec const& spec)
{
    spec.validate();
    auto const start = Clock::now();
    std::uint64_t const edges = edge_count(spec.d, spec.m) + edge_count(spec.d, spec.n);
    if (edges > 24)
        throw BudgetExceeded("exact enumeration limited to 24 edges, got "
                             + std::to_string(edges));
    auto const law_first = survivor_law(spec.d, spec.m, spec.p);
    auto const law_second = survivor_law(spec.d, spec.n, spec.q);

    std::uint64_t const leaves_m = std::uint64_t{1} << (spec.d * spec.m);
    std::uint64_t const leaves_n = std::uint64_t{1} << (spec.d * spec.n);
    // partners[x] = mask of second-tree leaves b with x + b in the target.
    std::vector<std::uint64_t> partners(leaves_m, 0);
    for (std::uint64_t x = 0; x < leaves_m; ++x)
    {
        LatticePoint const px = leaf_point(spec.d, spec.m, x);
        for (std::uint64_t b = 0; b < leaves_n; ++b)
        {
            if (spec.target.contains(px + leaf_point(spec.d, spec.n, b)))
                partners[x] |= std::uint64_t{1} << b;
        }
    }

    stats::CompensatedSum total;
    for (auto const& [mask_first, prob_first] : law_first)
    {
        std::uint64_t reach = 0;
        for (std::uint64_t x = 0; x < leaves_m; ++x)
        {
            if ((mask_first >> x) & 1u)
                reach |= partners[x];
        }
        if (reach == 0)
            continue;
        for (auto const& [mask_second, prob_second] : law_second)
        {
            if (reach & mask_second)
                total.add(prob_first * prob_second);
        }
    }

    EstimateResult r;
    r.estimate = std::clamp(total.value(), 0.0, 1.0);
    r.ci_low = r.estimate;
    r.ci_high = r.estimate;
    r.trials = std::uint64_t{1} << edges;
    r.method = EstimateMethod::exact_enum;
    r.elapsed_ms = elapsed_ms(start);
    return r;
}

bool sum_meets_target(PointSet const& first, PointSet const& second,
                      PointSet const& target)
{
    for (auto const& x : first)
    {
        for (auto const& y : second)
        {
            if (target.contains(x + y))
                return true;
        }
    }
    return false;
}

//---------------------------------------------------------------------------//
PaleyZygmund paley_zygmund(SumHitSpec const& spec, Measure const& mu,
                           std::uint64_t budget)
{
    spec.validate();
    auto const& support = mu.support();
    if (support.dim() != spec.d)
        throw DimensionMismatch("measure dimension does not match d");

    CenteredCube const cube_m(spec.d, spec.m);
    CenteredCube const cube_n(spec.d, spec.n);
    PointSet const xs = cube_m.points();

    // Valid (a, x) pairs with their leaf indices in both trees.
    struct Term
    {
        double weight;
        std::uint64_t leaf_first;
        std::uint64_t leaf_second;
    };
    std::vector<Term> terms;
    stats::CompensatedSum first;
    for (std::size_t i = 0; i < support.size(); ++i)
    {
        double const w = mu.weight(i);
        if (w == 0)
            continue;
        LatticePoint const& a = support[i];
        if (!spec.target.contains(a))
            throw InvalidArgument("measure must be supported on the target");
        std::uint64_t count = 0;
        for (auto const& x : xs)
        {
            LatticePoint const b = a - x;
            if (!cube_n.contains(b))
                continue;
            terms.push_back({w, leaf_index(x, spec.m), leaf_index(b, spec.n)});
            ++count;
        }
        first.add(w * static_cast<double>(count));
    }
    auto const nterms = static_cast<double>(terms.size());
    if (nterms * nterms > static_cast<double>(budget))
        throw BudgetExceeded("second moment exceeds the evaluation budget");

    std::vector<double> pow_first(static_cast<std::size_t>(spec.m) + 1);
    std::vector<double> pow_second(static_cast<std::size_t>(spec.n) + 1);
    for (int h = 0; h <= spec.m; ++h)
        pow_first[static_cast<std::size_t>(h)] = std::pow(spec.p, spec.m + h);
    for (int h = 0; h <= spec.n; ++h)
        pow_second[static_cast<std::size_t>(h)] = std::pow(spec.q, spec.n + h);

    auto height = [d = spec.d](std::uint64_t a, std::uint64_t b) {
        if (a == b)
            return 0;
        return (63 - std::countl_zero(a ^ b)) / d + 1;
    };

    stats::CompensatedSum second;
    for (auto const& s : terms)
    {
        stats::CompensatedSum row;
        for (auto const& t : terms)
        {
            row.add(t.weight
                    * pow_first[static_cast<std::size_t>(height(s.leaf_first, t.leaf_first))]
                    * pow_second[static_cast<std::size_t>(height(s.leaf_second, t.leaf_second))]);
        }
        second.add(s.weight * row.value());
    }

    PaleyZygmund r;
    r.first_moment = first.value() * std::pow(spec.p, spec.m) * std::pow(spec.q, spec.n);
    r.second_moment = second.value();
    r.bound = r.second_moment > 0 ? r.first_moment * r.first_moment / r.second_moment : 0.0;
    return r;
}

double paley_zygmund_bound(SumHitSpec const& spec, Measure const& mu)
{
    return paley_zygmund(spec, mu).bound;
}

//---------------------------------------------------------------------------//
std::uint64_t target_hash(PointSet const& target)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : format_point_set(target))
    {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hit_csv_header()
{
    return "d,p,q,m,n,target_hash,method,estimate,ci_low,ci_high,trials,seed,elapsed_ms";
}

std::string hit_csv_row(SumHitSpec const& spec, EstimateResult const& r)
{
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(target_hash(spec.target)));
    std::string out;
    out += std::to_string(spec.d) + ",";
    out += format_double(spec.p) + ",";
    out += format_double(spec.q) + ",";
    out += std::to_string(spec.m) + ",";
    out += std::to_string(spec.n) + ",";
    out += hash;
    out += ",";
    out += to_string(r.method);
    out += ",";
    out += format_double(r.estimate) + ",";
    out += format_double(r.ci_low) + ",";
    out += format_double(r.ci_high) + ",";
    out += std::to_string(r.trials) + ",";
    out += std::to_string(r.seed) + ",";
    char ms[32];
    std::snprintf(ms, sizeof(ms), "%.3f", r.elapsed_ms);
    out += ms;
    return out;
}

}  // namespace fracsum
