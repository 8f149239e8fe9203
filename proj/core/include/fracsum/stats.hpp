#pragma once

#include <cstdint>
#include <span>

namespace fracsum::stats {

// Two-sided standard normal quantiles.
inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ999 = 3.2905267314918945;

struct Interval
{
    double low = 0;
    double high = 0;

    double half_width() const noexcept { return 0.5 * (high - low); }
    bool contains(double x) const noexcept { return low <= x && x <= high; }
};

// Wilson score interval for a binomial proportion.
Interval wilson(std::uint64_t successes, std::uint64_t trials, double z);

// Normal-approximation interval for a mean of [0,1]-valued samples,
// clipped to [0, 1].
Interval mean_interval(double mean, double sample_variance, std::uint64_t n,
                       double z);

// Neumaier compensated summation.
class CompensatedSum
{
  public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + comp_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

// Ordinary least-squares slope of y against x.
double ols_slope(std::span<double const> x, std::span<double const> y);

// max/min of strictly positive values; +inf if any value is not positive.
double band(std::span<double const> values);

// Upper-tail probability of a chi-square variable with `dof` degrees of
// freedom.
double chi_square_sf(double statistic, double dof);

}  // namespace fracsum::stats
