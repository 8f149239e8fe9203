#include "fracsum/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "fracsum/errors.hpp"

namespace fracsum::stats {

Interval wilson(std::uint64_t successes, std::uint64_t trials, double z)
{
    if (trials == 0)
        throw InvalidArgument("Wilson interval needs at least one trial");
    double const n = static_cast<double>(trials);
    double const phat = static_cast<double>(successes) / n;
    double const z2 = z * z;
    double const denom = 1 + z2 / n;
    double const center = (phat + z2 / (2 * n)) / denom;
    double const half
        = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
    // Clamp so the interval always contains the point estimate despite
    // rounding at phat in {0, 1}.
    return {std::clamp(std::min(center - half, phat), 0.0, 1.0),
            std::clamp(std::max(center + half, phat), 0.0, 1.0)};
}

Interval mean_interval(double mean, double sample_variance, std::uint64_t n,
                       double z)
{
    if (n == 0)
        throw InvalidArgument("interval needs at least one sample");
    double const half
        = z * std::sqrt(std::max(sample_variance, 0.0) / static_cast<double>(n));
    return {std::clamp(mean - half, 0.0, mean), std::clamp(mean + half, mean, 1.0)};
}

void CompensatedSum::add(double x) noexcept
{
    double const t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

double ols_slope(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidArgument("slope needs at least two aligned points");
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0;
    double sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0)
        throw InvalidArgument("slope undefined for constant x");
    return sxy / sxx;
}

double band(std::span<double const> values)
{
    if (values.empty())
        return 1.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    for (double v : values)
    {
        if (!(v > 0) || !std::isfinite(v))
            return std::numeric_limits<double>::infinity();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi / lo;
}

double chi_square_sf(double statistic, double dof)
{
    if (dof <= 0)
        throw InvalidArgument("chi-square needs positive degrees of freedom");
    if (statistic <= 0)
        return 1.0;
    return boost::math::gamma_q(dof / 2, statistic / 2);
}

}  // namespace fracsum::stats
