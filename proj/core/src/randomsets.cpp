#include "fracsum/randomsets.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>

#include "fracsum/capacity.hpp"
#include "fracsum/errors.hpp"
#include "fracsum/parallel.hpp"
#include "fracsum/rng.hpp"
#include "fracsum/stats.hpp"
#include "fracsum/text_format.hpp"

namespace fracsum {
namespace {

using Clock = std::chrono::steady_clock;

// Steps of the walk as (axis, +-1) until the first exit from the ball, which
// is not reported. Stops early when on_step returns true; returns whether it
// did.
template<class OnStep>
bool walk_steps(SrwParams const& params, std::uint64_t seed, OnStep&& on_step)
{
    int const d = params.d;
    auto const limit = static_cast<std::uint64_t>(std::floor(params.radius * params.radius));
    std::uint64_t const budget = params.step_budget();
    rng::SplitMix64 gen(rng::mix64(seed));

    std::array<std::int64_t, kMaxDim> offset{};
    std::uint64_t sq = 0;
    for (std::uint64_t step = 0;; ++step)
    {
        if (step >= budget)
            throw BudgetExceeded("random walk exceeded its step budget of "
                                 + std::to_string(budget));
        std::uint64_t const r = gen.below(2 * static_cast<std::uint64_t>(d));
        int const axis = static_cast<int>(r >> 1);
        std::int64_t const delta = (r & 1u) ? 1 : -1;
        std::int64_t const o = offset[static_cast<std::size_t>(axis)];
        // |o + delta|^2 - |o|^2 = 2 o delta + 1
        sq = static_cast<std::uint64_t>(static_cast<std::int64_t>(sq) + 2 * o * delta + 1);
        offset[static_cast<std::size_t>(axis)] = o + delta;
        if (sq > limit)
            return false;
        if (on_step(axis, delta))
            return true;
    }
}

// Runs the walk, calling visit(point) on every visited site (start first,
// revisits included). Stops early when visit returns true; returns whether
// it did.
template<class Visit>
bool walk(SrwParams const& params, std::uint64_t seed, Visit&& visit)
{
    LatticePoint pos = params.start;
    if (visit(pos))
        return true;
    return walk_steps(params, seed, [&](int axis, std::int64_t delta) {
        pos = pos.with(axis, pos[axis] + delta);
        return visit(pos);
    });
}

// Points with every |coordinate| < 2^{bits-1} encoded as one integer,
// field i holding coordinate i + 2^{bits-1}. A unit step on an axis is then
// a single add, and differences of encodings are encodings of differences
// as long as every field stays in range.
struct Packing
{
    int bits = 0;

    static std::optional<Packing> fit(int d, std::int64_t bound)
    {
        int const bits = std::min(32, 64 / d);
        if (bound >= (std::int64_t{1} << (bits - 1)))
            return std::nullopt;
        return Packing{bits};
    }
    std::uint64_t unit(int axis) const noexcept
    {
        return std::uint64_t{1} << (axis * bits);
    }
    std::uint64_t encode(LatticePoint const& x) const noexcept
    {
        std::uint64_t key = 0;
        std::int64_t const bias = std::int64_t{1} << (bits - 1);
        for (int i = 0; i < x.dim(); ++i)
            key += static_cast<std::uint64_t>(x[i] + bias) << (i * bits);
        return key;
    }
};

// Open-addressing set of nonzero 64-bit keys.
class KeySet
{
  public:
    void insert(std::uint64_t key)
    {
        if (2 * (size_ + 1) > slots_.size())
            grow();
        std::size_t const mask = slots_.size() - 1;
        std::size_t s = static_cast<std::size_t>(rng::mix64(key)) & mask;
        while (slots_[s] != 0)
        {
            if (slots_[s] == key)
                return;
            s = (s + 1) & mask;
        }
        slots_[s] = key;
        ++size_;
    }
    bool contains(std::uint64_t key) const noexcept
    {
        if (slots_.empty())
            return false;
        std::size_t const mask = slots_.size() - 1;
        std::size_t s = static_cast<std::size_t>(rng::mix64(key)) & mask;
        while (slots_[s] != 0)
        {
            if (slots_[s] == key)
                return true;
            s = (s + 1) & mask;
        }
        return false;
    }
    void clear() noexcept
    {
        std::fill(slots_.begin(), slots_.end(), 0);
        size_ = 0;
    }
    std::size_t size() const noexcept { return size_; }

  private:
    void grow()
    {
        std::vector<std::uint64_t> old(std::max<std::size_t>(64, 2 * slots_.size()), 0);
        old.swap(slots_);
        size_ = 0;
        for (auto k : old)
        {
            if (k != 0)
                insert(k);
        }
    }

    std::vector<std::uint64_t> slots_;
    std::size_t size_ = 0;
};

std::int64_t sup_norm(LatticePoint const& x)
{
    std::int64_t m = 0;
    for (int i = 0; i < x.dim(); ++i)
        m = std::max(m, x[i] < 0 ? -x[i] : x[i]);
    return m;
}

PointSet shifted(PointSet const& a, LatticePoint const& x)
{
    return a.translated(x);
}

bool contains_origin(PointSet const& a)
{
    return a.contains(LatticePoint(a.dim()));
}

struct SetScratch
{
    KeySet packed;
    PointHashSet differences;
    std::vector<LatticePoint> survivors;
    LeafTarget leaves{1, 0};
};

// Binary outcome of one two-set trial against shifted_target = x + A.
bool two_set_trial(RandomSetSpec const& first, RandomSetSpec const& second,
                   PointSet const& shifted_target, std::uint64_t seed, SetScratch& s)
{
    std::uint64_t const seed_first = rng::derive(seed, 2);
    std::uint64_t const seed_second = rng::derive(seed, 1);

    if (first.kind == RandomSetKind::srw_range && second.kind == RandomSetKind::srw_range)
    {
        // Both walks stay within floor(R) of their starts, so the fields of
        // x + A - start_2 - offset_2 and start_1 + offset_1 are bounded.
        std::int64_t bound = sup_norm(first.srw.start)
                             + static_cast<std::int64_t>(std::floor(first.srw.radius));
        for (auto const& t : shifted_target)
            bound = std::max(bound, sup_norm(t - second.srw.start)
                                        + static_cast<std::int64_t>(std::floor(second.srw.radius)));
        if (auto const pack = Packing::fit(first.srw.d, bound + 1))
        {
            std::vector<std::uint64_t> base;
            for (auto const& t : shifted_target)
                base.push_back(pack->encode(t - second.srw.start));
            s.packed.clear();
            for (auto b : base)
                s.packed.insert(b);
            std::uint64_t shift = 0;
            walk_steps(second.srw, seed_second, [&](int axis, std::int64_t delta) {
                shift += delta > 0 ? pack->unit(axis) : std::uint64_t{0} - pack->unit(axis);
                for (auto b : base)
                    s.packed.insert(b - shift);
                return false;
            });
            std::uint64_t key = pack->encode(first.srw.start);
            if (s.packed.contains(key))
                return true;
            return walk_steps(first.srw, seed_first, [&](int axis, std::int64_t delta) {
                key += delta > 0 ? pack->unit(axis) : std::uint64_t{0} - pack->unit(axis);
                return s.packed.contains(key);
            });
        }
    }

    s.differences.clear();
    auto add_partner = [&](LatticePoint const& z) {
        for (auto const& t : shifted_target)
            s.differences.insert(t - z);
    };
    if (second.kind == RandomSetKind::srw_range)
    {
        walk(second.srw, seed_second, [&](LatticePoint const& z) {
            add_partner(z);
            return false;
        });
    }
    else
    {
        s.survivors.clear();
        std::optional<Box> partner;
        if (first.kind == RandomSetKind::fractal_percolation)
            partner = CenteredCube(first.fractal.d, first.fractal.level).box();
        collect_pruned_survivors(second.fractal, seed_second, shifted_target.points(),
                                 partner, s.survivors);
        for (auto const& z : s.survivors)
            add_partner(z);
    }
    if (s.differences.size() == 0)
        return false;

    if (first.kind == RandomSetKind::srw_range)
    {
        return walk(first.srw, seed_first,
                    [&](LatticePoint const& y) { return s.differences.contains(y); });
    }
    s.leaves = LeafTarget(first.fractal.d, first.fractal.level, s.differences.items());
    return hits(first.fractal, seed_first, s.leaves);
}

EstimateResult binary_estimate(std::uint64_t trials, std::uint64_t seed,
                               RunOptions const& options,
                               std::function<bool(std::uint64_t, SetScratch&)> const& trial)
{
    auto const start = Clock::now();
    std::size_t const chunk = std::max<std::size_t>(1, options.chunk_trials);
    std::size_t const chunks = static_cast<std::size_t>((trials + chunk - 1) / chunk);
    std::vector<std::uint64_t> counts(chunks, 0);
    for_each_chunk(chunks, options.workers, [&](std::size_t c) {
        SetScratch scratch;
        std::uint64_t const lo = c * chunk;
        std::uint64_t const hi = std::min<std::uint64_t>(trials, lo + chunk);
        std::uint64_t n = 0;
        for (std::uint64_t t = lo; t < hi; ++t)
            n += trial(rng::derive(seed, t), scratch) ? 1 : 0;
        counts[c] = n;
    });
    EstimateResult r;
    for (auto n : counts)
        r.successes += n;
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
    r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return r;
}

void finish_table(RangeHitTable& table)
{
    std::vector<double> ratios;
    for (auto const& row : table.rows)
        ratios.push_back(row.ratio);
    table.band = ratios.empty() ? 1.0 : stats::band(ratios);
}

}  // namespace

//---------------------------------------------------------------------------//
char const* to_string(RandomSetKind k)
{
    switch (k)
    {
        case RandomSetKind::fractal_percolation:
            return "fractal";
        case RandomSetKind::srw_range:
            return "srw";
        case RandomSetKind::branching_rw:
            return "brw";
    }
    return "?";
}

RandomSetKind parse_random_set_kind(std::string_view s)
{
    if (s == "fractal" || s == "fractal_percolation")
        return RandomSetKind::fractal_percolation;
    if (s == "srw" || s == "srw_range")
        return RandomSetKind::srw_range;
    if (s == "brw" || s == "branching_rw")
        return RandomSetKind::branching_rw;
    throw ParseError("unknown random set kind '" + std::string(s) + "'");
}

std::uint64_t SrwParams::step_budget() const
{
    if (max_steps != 0)
        return max_steps;
    double const automatic = std::max(1e6, 1000.0 * radius * radius);
    if (automatic > 1e15)
        throw BudgetExceeded("walk radius too large for the automatic step budget");
    return static_cast<std::uint64_t>(automatic);
}

RandomSetSpec RandomSetSpec::srw_range(int d, double radius)
{
    return srw_range(d, radius, LatticePoint(d));
}

RandomSetSpec RandomSetSpec::srw_range(int d, double radius, LatticePoint start)
{
    RandomSetSpec s;
    s.kind = RandomSetKind::srw_range;
    s.srw.d = d;
    s.srw.radius = radius;
    s.srw.start = std::move(start);
    s.alpha = d - 2;
    s.beta = d - 2;
    return s;
}

RandomSetSpec RandomSetSpec::fractal_percolation(PercolationParams params)
{
    RandomSetSpec s;
    s.kind = RandomSetKind::fractal_percolation;
    s.fractal = params;
    s.alpha = -std::log2(params.p);
    s.beta = s.alpha;
    return s;
}

int RandomSetSpec::dim() const noexcept
{
    return kind == RandomSetKind::srw_range ? srw.d : fractal.d;
}

void RandomSetSpec::validate(int minimum_srw_dim) const
{
    switch (kind)
    {
        case RandomSetKind::branching_rw:
            throw InvalidArgument("branching random walk ranges are not supported");
        case RandomSetKind::fractal_percolation:
            fractal.validate();
            break;
        case RandomSetKind::srw_range:
            if (srw.d < minimum_srw_dim || srw.d > kMaxDim)
                throw InvalidArgument("walk ranges need " + std::to_string(minimum_srw_dim)
                                      + " <= d <= 8 here, got d=" + std::to_string(srw.d));
            if (!(srw.radius >= 0) || !std::isfinite(srw.radius))
                throw InvalidArgument("walk radius must be finite and nonnegative");
            if (srw.start.dim() != srw.d)
                throw DimensionMismatch("walk start dimension does not match d");
            break;
    }
    if (!(alpha > 0) || !(beta >= 0))
        throw InvalidArgument("declared exponents need alpha > 0, beta >= 0");
}

//---------------------------------------------------------------------------//
PointSet sample_srw_range(RandomSetSpec const& spec, std::uint64_t seed)
{
    if (spec.kind != RandomSetKind::srw_range)
        throw InvalidArgument("sample_srw_range needs an srw_range spec");
    spec.validate(3);
    PointHashSet visited;
    walk(spec.srw, seed, [&](LatticePoint const& y) {
        visited.insert(y);
        return false;
    });
    auto items = visited.items();
    return PointSet(spec.srw.d, std::vector<LatticePoint>(items.begin(), items.end()));
}

PointSet sample_random_set(RandomSetSpec const& spec, std::uint64_t seed)
{
    if (spec.kind == RandomSetKind::srw_range)
        return sample_srw_range(spec, seed);
    spec.validate();
    return sample(spec.fractal, seed).survivors;
}

//---------------------------------------------------------------------------//
RangeHitTable single_set_hit_check(RandomSetSpec const& spec, PointSet const& a,
                                   std::vector<LatticePoint> const& x_values,
                                   std::uint64_t trials, std::uint64_t seed,
                                   RunOptions const& options)
{
    spec.validate(3);
    if (trials < 1)
        throw InvalidArgument("need at least one trial");
    if (a.empty() || a.dim() != spec.dim())
        throw DimensionMismatch("target must be nonempty and match the set's dimension");
    if (!contains_origin(a))
        throw InvalidArgument("target must contain the origin");
    double const cap = capacity(a, spec.alpha).value;
    double const diam = a.diameter();

    RangeHitTable table;
    for (std::size_t i = 0; i < x_values.size(); ++i)
    {
        LatticePoint const& x = x_values[i];
        if (x.dim() != spec.dim())
            throw DimensionMismatch("x dimension does not match the set's dimension");
        double const nx = norm(x);
        if (nx < 2 * diam)
            throw InvalidArgument("need |x| >= 2 diam(A); |x|=" + format_double(nx)
                                  + ", diam=" + format_double(diam));
        PointSet const target = shifted(a, x);
        std::uint64_t const cell = rng::derive(seed, i);

        RangeHitRow row;
        row.x = x;
        row.norm = nx;
        if (spec.kind == RandomSetKind::srw_range)
        {
            row.estimate = binary_estimate(trials, cell, options, [&](std::uint64_t s, SetScratch&) {
                return walk(spec.srw, s, [&](LatticePoint const& y) { return target.contains(y); });
            });
        }
        else
        {
            LeafTarget const leaves(spec.fractal.d, spec.fractal.level, target.points());
            row.estimate = binary_estimate(trials, cell, options, [&](std::uint64_t s, SetScratch&) {
                return hits(spec.fractal, s, leaves);
            });
        }
        row.reference = std::pow(nx, -spec.beta) * cap;
        row.ratio = row.estimate.estimate / row.reference;
        table.rows.push_back(std::move(row));
    }
    finish_table(table);
    return table;
}

double sum_exponent(RandomSetSpec const& first, RandomSetSpec const& second)
{
    return first.alpha + second.alpha - first.dim();
}

double sum_radius_threshold(RandomSetSpec const& first, RandomSetSpec const& second,
                            PointSet const& a)
{
    double const d = first.dim();
    double const diam = a.diameter();
    double extra = 0;
    for (auto const* s : {&first, &second})
    {
        if (!(s->alpha <= s->beta))
            continue;
        if (!(d - s->beta > 0))
            throw InvalidArgument("radius condition needs beta < d");
        double const term = std::pow(diam, (d - s->alpha) / (d - s->beta))
                            * std::pow(std::log(diam + 1), 1 / (d - s->beta));
        extra = std::max(extra, term);
    }
    return 2 * diam + extra;
}

bool sum_hits_once(RandomSetSpec const& first, RandomSetSpec const& second,
                   PointSet const& shifted_target, std::uint64_t seed)
{
    SetScratch scratch;
    return two_set_trial(first, second, shifted_target, seed, scratch);
}

RangeHitTable sum_of_ranges_hit(RandomSetSpec const& first, RandomSetSpec const& second,
                                PointSet const& a,
                                std::vector<LatticePoint> const& x_values,
                                std::uint64_t trials, std::uint64_t seed,
                                RunOptions const& options)
{
    first.validate(5);
    second.validate(5);
    if (trials < 1)
        throw InvalidArgument("need at least one trial");
    int const d = first.dim();
    if (second.dim() != d || a.dim() != d || a.empty())
        throw DimensionMismatch("both sets and the target must share the dimension");
    double const gamma = sum_exponent(first, second);
    if (!(gamma > 0))
        throw InvalidArgument("exponent condition gamma = alpha_1 + alpha_2 - d > 0 violated "
                              "(gamma = " + format_double(gamma) + ")");
    if (!contains_origin(a))
        throw InvalidArgument("target must contain the origin");
    double const threshold = sum_radius_threshold(first, second, a);
    double const cap = capacity(a, gamma).value;
    bool const both_fractal = first.kind == RandomSetKind::fractal_percolation
                              && second.kind == RandomSetKind::fractal_percolation;

    RangeHitTable table;
    for (std::size_t i = 0; i < x_values.size(); ++i)
    {
        LatticePoint const& x = x_values[i];
        if (x.dim() != d)
            throw DimensionMismatch("x dimension does not match the sets' dimension");
        double const nx = norm(x);
        if (nx < threshold)
            throw InvalidArgument("|x| = " + format_double(nx)
                                  + " is below the radius threshold " + format_double(threshold));
        PointSet const target = shifted(a, x);
        std::uint64_t const cell = rng::derive(seed, i);

        RangeHitRow row;
        row.x = x;
        row.norm = nx;
        if (both_fractal)
        {
            bool const swap = first.fractal.level > second.fractal.level;
            auto const& lo = swap ? second.fractal : first.fractal;
            auto const& hi = swap ? first.fractal : second.fractal;
            SumHitSpec spec{d, lo.p, hi.p, lo.level, hi.level, target};
            row.estimate = sum_hit_mc(spec, trials, cell, options);
        }
        else
        {
            row.estimate = binary_estimate(trials, cell, options,
                                           [&](std::uint64_t s, SetScratch& scratch) {
                                               return two_set_trial(first, second, target, s,
                                                                    scratch);
                                           });
        }
        row.reference = std::pow(nx, d - first.beta - second.beta) * cap;
        row.ratio = row.estimate.estimate / row.reference;
        table.rows.push_back(std::move(row));
    }
    finish_table(table);
    return table;
}

//---------------------------------------------------------------------------//
std::string range_csv_header()
{
    return hit_csv_header() + ",kind,truncation,x,ratio";
}

std::string range_csv_row(RandomSetSpec const& first, RandomSetSpec const* second,
                          PointSet const& a, RangeHitRow const& row)
{
    auto fractal_of = [](RandomSetSpec const* s) -> PercolationParams const* {
        return s && s->kind == RandomSetKind::fractal_percolation ? &s->fractal : nullptr;
    };
    auto const* f1 = fractal_of(&first);
    auto const* f2 = fractal_of(second);
    auto opt_double = [](PercolationParams const* f) { return f ? format_double(f->p) : std::string(); };
    auto opt_level = [](PercolationParams const* f) { return f ? std::to_string(f->level) : std::string(); };

    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(target_hash(a.translated(row.x))));
    char ms[32];
    std::snprintf(ms, sizeof(ms), "%.3f", row.estimate.elapsed_ms);

    std::string kind = to_string(first.kind);
    if (second)
        kind += std::string("+") + to_string(second->kind);
    std::string truncation;
    if (first.kind == RandomSetKind::srw_range)
        truncation = format_double(first.srw.radius);
    else if (second && second->kind == RandomSetKind::srw_range)
        truncation = format_double(second->srw.radius);

    std::string x;
    for (int i = 0; i < row.x.dim(); ++i)
    {
        if (i)
            x += ' ';
        x += std::to_string(row.x[i]);
    }

    std::string out;
    out += std::to_string(first.dim()) + ",";
    out += opt_double(f1) + "," + opt_double(f2) + ",";
    out += opt_level(f1) + "," + opt_level(f2) + ",";
    out += std::string(hash) + ",";
    out += std::string(to_string(row.estimate.method)) + ",";
    out += format_double(row.estimate.estimate) + ",";
    out += format_double(row.estimate.ci_low) + ",";
    out += format_double(row.estimate.ci_high) + ",";
    out += std::to_string(row.estimate.trials) + ",";
    out += std::to_string(row.estimate.seed) + ",";
    out += std::string(ms) + ",";
    out += kind + "," + truncation + "," + x + "," + format_double(row.ratio);
    return out;
}

}  // namespace fracsum
