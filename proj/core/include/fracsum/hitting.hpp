#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fracsum/capacity.hpp"
#include "fracsum/fractal.hpp"
#include "fracsum/lattice.hpp"
#include "fracsum/stats.hpp"

namespace fracsum {

//---------------------------------------------------------------------------//
/*!
 * Hitting problem for the Minkowski sum Q_d(p; m) + Q'_d(q; n) of two
 * independent fractal percolations against a target set.
 */
struct SumHitSpec
{
    int d = 1;
    double p = 0.5;
    double q = 0.5;
    int m = 1;
    int n = 1;
    PointSet target;

    // -log2(2^d p q)
    double beta() const noexcept;
    // beta > 0 and p, q > 2^{-d}.
    bool parameters_valid() const noexcept;
    // [-2^{n-1} - 2^{m-1}, 2^{n-1} + 2^{m-1})^d as a closed integer box.
    Box extended_box() const;

    PercolationParams first() const { return {d, p, m}; }
    PercolationParams second() const { return {d, q, n}; }

    // Throws InvalidArgument unless 0 <= m <= n, p, q in (0,1), the target
    // is nonempty, of dimension d and inside extended_box().
    void validate() const;
};

enum class EstimateMethod
{
    mc,
    rao_blackwell,
    exact_enum,
};

char const* to_string(EstimateMethod m);
EstimateMethod parse_estimate_method(std::string_view s);

struct EstimateResult
{
    double estimate = 0;
    std::uint64_t trials = 0;
    double ci_low = 0;   // 95%
    double ci_high = 0;  // 95%
    EstimateMethod method = EstimateMethod::mc;
    std::uint64_t seed = 0;
    double elapsed_ms = 0;
    // Per-trial sample variance (0 for exact results).
    double variance = 0;
    // Number of hits (mc only).
    std::uint64_t successes = 0;

    // Interval at another confidence level: Wilson for mc, normal for
    // rao_blackwell, degenerate for exact_enum.
    stats::Interval interval(double z) const;
};

struct RunOptions
{
    // 0 = hardware concurrency.
    unsigned workers = 1;
    // Trials per work item. Fixed chunk boundaries make reductions
    // independent of the worker count.
    std::size_t chunk_trials = 4096;
    // Maximum 2^{d m} for the Rao-Blackwell inner exact oracle.
    std::uint64_t frontier_budget = std::uint64_t{1} << 22;
};

// Per-trial seeds of the two percolations.
std::uint64_t first_seed(std::uint64_t run_seed, std::uint64_t trial);
std::uint64_t second_seed(std::uint64_t run_seed, std::uint64_t trial);

/*!
 * Plain Monte Carlo. Each trial samples Q' pruned to blocks that can reach
 * the target through Delta_m, forms D = (target - Q') ∩ Delta_m, and runs an
 * early-exit descent of Q against D.
 */
EstimateResult sum_hit_mc(SumHitSpec const& spec, std::uint64_t trials,
                          std::uint64_t seed, RunOptions const& options = {});

/*!
 * Conditional Monte Carlo: the same Q' per trial as sum_hit_mc with the same
 * seed, scored by the exact probability that Q meets D.
 */
EstimateResult sum_hit_rao_blackwell(SumHitSpec const& spec, std::uint64_t trials,
                                     std::uint64_t seed,
                                     RunOptions const& options = {});

/*!
 * Exact probability by summing over all joint edge configurations of both
 * trees. Limited to sum_{j<=m} 2^{dj} + sum_{j<=n} 2^{dj} <= 24 edges.
 */
EstimateResult sum_hit_exact_enum(SumHitSpec const& spec);

std::uint64_t edge_count(int d, int level);

// Does (q_survivors + r_survivors) meet the target? Direct Minkowski form,
// used to cross-check the difference-set test.
bool sum_meets_target(PointSet const& first, PointSet const& second,
                      PointSet const& target);

struct PaleyZygmund
{
    double first_moment = 0;   // E[L_mu]
    double second_moment = 0;  // E[L_mu^2]
    double bound = 0;          // E[L_mu]^2 / E[L_mu^2]
};

/*!
 * Second-moment lower bound for L_mu = sum_a mu(a) #{x : x in Q, a - x in Q'}
 * with exact tree pair probabilities p^{m+h} q^{n+h'} (not their upper
 * bounds), so the result is a certified lower bound on the hit probability.
 */
PaleyZygmund paley_zygmund(SumHitSpec const& spec, Measure const& mu,
                           std::uint64_t budget = 50'000'000);
double paley_zygmund_bound(SumHitSpec const& spec, Measure const& mu);

// CSV row d,p,q,m,n,target_hash,method,estimate,ci_low,ci_high,trials,seed,elapsed_ms
std::string hit_csv_header();
std::string hit_csv_row(SumHitSpec const& spec, EstimateResult const& r);

// Stable 64-bit hash of a point set's text form (hex in CSV output).
std::uint64_t target_hash(PointSet const& target);

}  // namespace fracsum
