#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fracsum/fractal.hpp"
#include "fracsum/hitting.hpp"
#include "fracsum/lattice.hpp"

namespace fracsum {

enum class RandomSetKind
{
    fractal_percolation,
    srw_range,
    // Reserved; every operation rejects it.
    branching_rw,
};

char const* to_string(RandomSetKind k);
RandomSetKind parse_random_set_kind(std::string_view s);

struct SrwParams
{
    int d = 5;
    // Walk stops at the first step leaving the closed ball of this radius
    // around the start.
    double radius = 8;
    LatticePoint start;
    // 0 = automatic: max(10^6, 1000 R^2).
    std::uint64_t max_steps = 0;

    std::uint64_t step_budget() const;
};

/*!
 * A random set satisfying P(R ∩ (x+B) ≠ ∅) ≍ |x|^{-beta} Cap_alpha(B).
 * Exponents default to alpha = beta = d - 2 for walk ranges and
 * alpha = beta = -log2 p for fractal percolation, and may be overridden.
 */
struct RandomSetSpec
{
    RandomSetKind kind = RandomSetKind::srw_range;
    PercolationParams fractal;
    SrwParams srw;
    double alpha = 0;
    double beta = 0;

    static RandomSetSpec srw_range(int d, double radius);
    static RandomSetSpec srw_range(int d, double radius, LatticePoint start);
    static RandomSetSpec fractal_percolation(PercolationParams params);

    int dim() const noexcept;
    // minimum_srw_dim is 3 for single-set checks and 5 for two-range sums.
    void validate(int minimum_srw_dim = 3) const;
};

/*!
 * Visited set of a nearest-neighbour walk from the start until its first
 * exit from the ball of radius R (the exit point is excluded). Steps come
 * from one sequential stream, so runs with equal seeds and different radii
 * are coupled: the smaller range is a subset of the larger.
 */
PointSet sample_srw_range(RandomSetSpec const& spec, std::uint64_t seed);

// Sample of either kind (fractal: the full percolation).
PointSet sample_random_set(RandomSetSpec const& spec, std::uint64_t seed);

struct RangeHitRow
{
    LatticePoint x;
    double norm = 0;
    EstimateResult estimate;
    // |x|^{-beta} Cap_alpha(A) for single sets,
    // |x|^{d - beta_1 - beta_2} Cap_gamma(A) for sums.
    double reference = 0;
    double ratio = 0;
};

struct RangeHitTable
{
    std::vector<RangeHitRow> rows;
    // max/min of the ratios (inf if some estimate is zero).
    double band = 0;
};

/*!
 * Monte Carlo P(R ∩ (x+A) ≠ ∅) for each x, requiring |x| >= 2 diam(A).
 * Trial t of row i uses seed derive(seed, {i, t}).
 */
RangeHitTable single_set_hit_check(RandomSetSpec const& spec, PointSet const& a,
                                   std::vector<LatticePoint> const& x_values,
                                   std::uint64_t trials, std::uint64_t seed,
                                   RunOptions const& options = {});

// gamma = alpha_1 + alpha_2 - d.
double sum_exponent(RandomSetSpec const& first, RandomSetSpec const& second);

// Smallest |x| admitted for the two-set hitting estimate:
// 2 diam(A) + max_i 1{alpha_i <= beta_i} diam^{(d-alpha_i)/(d-beta_i)}
//   log^{1/(d-beta_i)}(diam + 1).
double sum_radius_threshold(RandomSetSpec const& first, RandomSetSpec const& second,
                            PointSet const& a);

/*!
 * Monte Carlo P((R_1 + R_2) ∩ (x+A) ≠ ∅) through R_1 ∩ (x + A - R_2) ≠ ∅.
 * Two fractal percolations are delegated to sum_hit_mc (same seeds).
 * Rejects gamma <= 0, A not containing the origin and x below the radius
 * threshold.
 */
RangeHitTable sum_of_ranges_hit(RandomSetSpec const& first, RandomSetSpec const& second,
                                PointSet const& a,
                                std::vector<LatticePoint> const& x_values,
                                std::uint64_t trials, std::uint64_t seed,
                                RunOptions const& options = {});

// One trial of the difference-set test; exposed for cross-checks.
bool sum_hits_once(RandomSetSpec const& first, RandomSetSpec const& second,
                   PointSet const& shifted_target, std::uint64_t seed);

// Hitting CSV columns plus kind, truncation radius, x and ratio.
std::string range_csv_header();
std::string range_csv_row(RandomSetSpec const& first, RandomSetSpec const* second,
                          PointSet const& a, RangeHitRow const& row);

}  // namespace fracsum
