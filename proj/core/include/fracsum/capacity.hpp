#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracsum/errors.hpp"
#include "fracsum/lattice.hpp"

namespace fracsum {

//---------------------------------------------------------------------------//
/*!
 * Riesz kernel with unit clamp, k(x, y) = (|x - y| v 1)^{-beta}.
 *
 * Evaluated from the exact integer squared distance so that translated sets
 * produce bit-identical kernel matrices. k(x, x) = 1.
 */
class Kernel
{
  public:
    explicit Kernel(double beta);

    double beta() const noexcept { return beta_; }
    double operator()(LatticePoint const& x, LatticePoint const& y) const;
    double from_squared_distance(std::uint64_t sq) const noexcept;

  private:
    double beta_;
};

//---------------------------------------------------------------------------//
//! Probability weights over a point set (aligned with its sorted order).
class Measure
{
  public:
    Measure() = default;
    // Validates: weights >= 0 and summing to 1 within 1e-12.
    Measure(PointSet support, std::vector<double> weights);

    static Measure uniform(PointSet support);
    static Measure dirac(int d, LatticePoint const& atom);

    PointSet const& support() const noexcept { return support_; }
    std::span<double const> weights() const noexcept { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }
    double weight_of(LatticePoint const& x) const;

  private:
    PointSet support_;
    std::vector<double> weights_;
};

enum class CapacityMethod
{
    analytic,
    linear_solve,
    frank_wolfe,
    brute_force,
    face_enumeration,
};

char const* to_string(CapacityMethod m);
CapacityMethod parse_capacity_method(std::string_view s);

struct CapacityOptions
{
    // Relative duality-gap tolerance.
    double tol = 1e-8;
    std::int64_t max_iterations = 100000;
    // Reciprocal-condition threshold below which the linear solve is skipped.
    double max_condition = 1e12;
};

struct CapacityResult
{
    double value = 0;   // capacity = 1 / energy
    double energy = 0;  // minimal energy
    Measure equilibrium;
    double duality_gap = 0;
    std::int64_t iterations = 0;
    CapacityMethod method = CapacityMethod::analytic;
    bool converged = true;
};

// Raised when the iterative solver runs out of iterations; carries the best
// iterate.
class CapacityNotConverged : public Error
{
  public:
    CapacityNotConverged(std::string const& what, CapacityResult best)
        : Error(what), best_(std::move(best))
    {
    }
    CapacityResult const& best() const noexcept { return best_; }

  private:
    CapacityResult best_;
};

//---------------------------------------------------------------------------//
// Quadratic form sum_{x,y} mu(x) mu(y) k(x,y), compensated.
double energy(Measure const& mu, double beta);

// Potentials U(x) = sum_y k(x,y) mu(y) at every support point.
std::vector<double> potentials(Measure const& mu, double beta);

// Dense kernel matrix in support order, row-major.
std::vector<double> kernel_matrix(PointSet const& a, double beta);

/*!
 * Discrete capacity Cap_beta(A): reciprocal of the minimal energy over
 * probability measures on A.
 *
 * Singletons are analytic. Otherwise the unconstrained system K w = 1 is
 * solved by Cholesky; a nonnegative solution normalizes to the equilibrium
 * measure. Failing that, Frank-Wolfe with away steps runs from the uniform
 * measure until the pairwise gap max_supp U - min U <= tol * energy, and the
 * final support is polished by an exact restricted solve.
 *
 * The kernel is indefinite when points are adjacent, so the FW fixed point
 * can be local. Sets of at most 12 points are instead solved exactly by
 * visiting every face; up to 64 points, a drop-one search re-runs FW with
 * each support point removed and keeps improvements.
 */
CapacityResult capacity(PointSet const& a, double beta,
                        CapacityOptions const& options = {});
CapacityResult capacity(PointSet const& a, double beta, double tol);

/*!
 * Grid search over the simplex; test oracle only (|A| <= 6).
 *
 * Exhaustive on the coarsest grid that fits the evaluation budget, then
 * successively finer local grids down to `grid_step`, then one pass of
 * single-unit mass transfers at `grid_step`.
 */
CapacityResult capacity_bruteforce(PointSet const& a, double beta,
                                   double grid_step);

// Flat key=value block followed by the equilibrium in weighted point format.
std::string format_capacity_result(CapacityResult const& r);
CapacityResult parse_capacity_result(std::string_view text);

}  // namespace fracsum
