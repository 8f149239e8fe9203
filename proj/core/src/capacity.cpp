#include "fracsum/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "fracsum/stats.hpp"
#include "fracsum/text_format.hpp"

namespace fracsum {
namespace {

void check_beta(double beta)
{
    if (!(beta > 0) || !std::isfinite(beta))
        throw InvalidArgument("beta must be positive and finite");
}

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kEnumerateFacesMax = 12;
constexpr std::size_t kLocalSearchMax = 64;

Matrix build_kernel(PointSet const& a, double beta)
{
    Kernel const kernel(beta);
    auto const n = static_cast<Eigen::Index>(a.size());
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j)
        {
            double v = kernel.from_squared_distance(
                squared_distance(a[static_cast<std::size_t>(i)],
                                 a[static_cast<std::size_t>(j)]));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

double quad_form(Matrix const& k, std::span<double const> w)
{
    stats::CompensatedSum s;
    auto const n = static_cast<Eigen::Index>(w.size());
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (w[i] == 0)
            continue;
        stats::CompensatedSum row;
        for (Eigen::Index j = 0; j < n; ++j)
            row.add(k(i, j) * w[j]);
        s.add(w[i] * row.value());
    }
    return s.value();
}

std::vector<double> mat_vec(Matrix const& k, std::span<double const> w)
{
    auto const n = static_cast<Eigen::Index>(w.size());
    std::vector<double> g(w.size(), 0.0);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        stats::CompensatedSum row;
        for (Eigen::Index j = 0; j < n; ++j)
        {
            if (w[j] != 0)
                row.add(k(i, j) * w[j]);
        }
        g[i] = row.value();
    }
    return g;
}

// Normalizes nonnegative weights in place; exact zeros stay zero.
void normalize(std::vector<double>& w)
{
    stats::CompensatedSum s;
    for (double x : w)
        s.add(x);
    double const total = s.value();
    for (double& x : w)
        x /= total;
}

struct Candidate
{
    std::vector<double> weights;
    double energy = 0;
    double gap = 0;  // relative pairwise gap
};

// FW gap 2(f - min g) and pairwise gap max_{supp} g - min g.
std::pair<double, double> gaps(std::span<double const> w, std::span<double const> g,
                               double f)
{
    double gmin = std::numeric_limits<double>::infinity();
    double gmax_supp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        gmin = std::min(gmin, g[i]);
        if (w[i] > 0)
            gmax_supp = std::max(gmax_supp, g[i]);
    }
    return {std::max(0.0, 2 * (f - gmin)), std::max(0.0, gmax_supp - gmin)};
}

// Solve K_SS w = 1 on the support of `w`; returns the normalized measure if
// the solution is strictly positive.
std::optional<std::vector<double>> restricted_solve(Matrix const& k,
                                                    std::span<double const> w)
{
    std::vector<Eigen::Index> supp;
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        if (w[i] > 0)
            supp.push_back(static_cast<Eigen::Index>(i));
    }
    auto const s = static_cast<Eigen::Index>(supp.size());
    Eigen::MatrixXd sub(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
    {
        for (Eigen::Index j = 0; j < s; ++j)
            sub(i, j) = k(supp[i], supp[j]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sub);
    if (!(lu.rcond() > 1e-13))
        return std::nullopt;
    Eigen::VectorXd sol = lu.solve(Eigen::VectorXd::Ones(s));
    std::vector<double> out(w.size(), 0.0);
    for (Eigen::Index i = 0; i < s; ++i)
    {
        if (!(sol(i) > 0))
            return std::nullopt;
        out[static_cast<std::size_t>(supp[i])] = sol(i);
    }
    normalize(out);
    return out;
}

CapacityResult make_result(PointSet const& a, std::vector<double> weights,
                           double f, double gap, std::int64_t iterations,
                           CapacityMethod method, bool converged)
{
    CapacityResult r;
    r.energy = f;
    r.value = 1.0 / f;
    r.equilibrium = Measure(a, std::move(weights));
    r.duality_gap = gap;
    r.iterations = iterations;
    r.method = method;
    r.converged = converged;
    return r;
}

struct FwRun
{
    std::vector<double> w;
    double f = 0;
    double gap = 0;
    std::int64_t iterations = 0;
    bool converged = false;
};

FwRun frank_wolfe(Matrix const& k, std::vector<double> w, CapacityOptions const& opt)
{
    std::size_t const n = w.size();
    std::vector<double> g = mat_vec(k, w);
    double f = quad_form(k, w);

    std::int64_t it = 0;
    bool converged = false;
    for (; it < opt.max_iterations; ++it)
    {
        if (it % 256 == 255)
        {
            // Refresh the incrementally updated gradient and energy.
            g = mat_vec(k, w);
            f = quad_form(k, w);
        }
        std::size_t s = 0;
        std::size_t v = n;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (g[i] < g[s])
                s = i;
            if (w[i] > 0 && (v == n || g[i] > g[v]))
                v = i;
        }
        double const fw_dir = f - g[s];    // -(direction . grad)/2, FW
        double const away_dir = g[v] - f;  // same, away
        if (g[v] - g[s] <= opt.tol * f)
        {
            converged = true;
            break;
        }
        bool const toward = fw_dir >= away_dir;
        std::size_t const j = toward ? s : v;
        double const slope = toward ? fw_dir : away_dir;
        double const curv = toward ? k(j, j) - 2 * g[j] + f : f - 2 * g[j] + k(j, j);
        double const gamma_max = toward ? 1.0 : w[v] / (1.0 - w[v]);
        double gamma = curv > 0 ? slope / curv : gamma_max;
        gamma = std::clamp(gamma, 0.0, gamma_max);
        if (gamma == 0)
        {
            converged = true;
            break;
        }
        double const sign = toward ? 1.0 : -1.0;
        double const scale = 1.0 + (toward ? -gamma : gamma);
        for (std::size_t i = 0; i < n; ++i)
        {
            w[i] *= scale;
            g[i] = g[i] * scale + sign * gamma * k(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j));
        }
        w[j] += sign * gamma;
        if (!toward && gamma == gamma_max)
            w[j] = 0;  // drop step
        if (w[j] < 0)
            w[j] = 0;
        f = f - 2 * gamma * slope + gamma * gamma * curv;
    }

    normalize(w);
    g = mat_vec(k, w);
    f = quad_form(k, w);
    auto [fw_gap, pair_gap] = gaps(w, g, f);
    (void)pair_gap;

    if (auto polished = restricted_solve(k, w))
    {
        auto g2 = mat_vec(k, *polished);
        double const f2 = quad_form(k, *polished);
        auto [fw2, pair2] = gaps(*polished, g2, f2);
        (void)pair2;
        if (f2 <= f)
        {
            w = std::move(*polished);
            f = f2;
            fw_gap = fw2;
        }
    }
    return {std::move(w), f, fw_gap, it, converged};
}

Matrix without(Matrix const& k, std::size_t drop)
{
    auto const n = k.rows() - 1;
    auto const d = static_cast<Eigen::Index>(drop);
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        for (Eigen::Index j = 0; j < n; ++j)
            out(i, j) = k(i < d ? i : i + 1, j < d ? j : j + 1);
    }
    return out;
}

// The kernel is indefinite once two points are adjacent, so Frank-Wolfe only
// finds a KKT point. Local search around it: for each support point i, empty
// it (or, with `exchange`, hand its mass to an off-support point j) and
// re-run with i removed; keep any strictly lower energy and start over.
void local_search(Matrix const& k, FwRun& best, CapacityOptions const& opt, bool exchange)
{
    std::size_t const n = best.w.size();
    std::int64_t iterations = best.iterations;
    auto try_start = [&](std::size_t i, std::size_t j) {
        std::vector<double> start;
        for (std::size_t l = 0; l < n; ++l)
        {
            if (l == i)
                continue;
            start.push_back(l == j ? best.w[i] : best.w[l]);
        }
        normalize(start);
        FwRun r = frank_wolfe(without(k, i), std::move(start), opt);
        iterations += r.iterations;
        if (!(r.f < best.f * (1 - 1e-12)))
            return false;
        r.w.insert(r.w.begin() + static_cast<std::ptrdiff_t>(i), 0.0);
        // Re-run on the full set so the gap refers to all of A.
        best = frank_wolfe(k, std::move(r.w), opt);
        iterations += best.iterations;
        return true;
    };
    for (bool improved = true; improved;)
    {
        improved = false;
        for (std::size_t i = 0; i < n && !improved; ++i)
        {
            if (best.w[i] <= 0 || best.w[i] >= 1)
                continue;
            improved = try_start(i, n);
            for (std::size_t j = 0; exchange && j < n && !improved; ++j)
            {
                if (best.w[j] == 0 && j != i)
                    improved = try_start(i, j);
            }
        }
    }
    best.iterations = iterations;
}

// Global minimum by visiting every face: the bordered KKT system
// [K_S 1; 1' 0] (w, -lambda) = (0, 1) on each support S, keeping positive
// solutions. Energy at such a point is lambda.
std::optional<FwRun> enumerate_faces(Matrix const& k)
{
    auto const n = static_cast<std::size_t>(k.rows());
    FwRun best;
    best.f = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> supp;
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask)
    {
        supp.clear();
        for (std::size_t i = 0; i < n; ++i)
        {
            if (mask >> i & 1u)
                supp.push_back(static_cast<Eigen::Index>(i));
        }
        auto const s = static_cast<Eigen::Index>(supp.size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s + 1, s + 1);
        for (Eigen::Index i = 0; i < s; ++i)
        {
            for (Eigen::Index j = 0; j < s; ++j)
                m(i, j) = k(supp[i], supp[j]);
            m(i, s) = -1;
            m(s, i) = 1;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        if (!(lu.rcond() > 1e-13))
            continue;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
        rhs(s) = 1;
        Eigen::VectorXd const sol = lu.solve(rhs);
        if (!(sol.head(s).array() >= 0).all() || !(sol(s) < best.f))
            continue;
        best.w.assign(n, 0.0);
        for (Eigen::Index i = 0; i < s; ++i)
            best.w[static_cast<std::size_t>(supp[i])] = sol(i);
        best.f = sol(s);
    }
    if (best.w.empty())
        return std::nullopt;
    normalize(best.w);
    best.f = quad_form(k, best.w);
    best.gap = gaps(best.w, mat_vec(k, best.w), best.f).first;
    best.iterations = static_cast<std::int64_t>((std::uint64_t{1} << n) - 1);
    best.converged = true;
    return best;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t r)
{
    r = std::min(r, n - r);
    double acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i)
        acc = acc * static_cast<double>(n - r + i) / static_cast<double>(i);
    return static_cast<std::uint64_t>(std::llround(acc));
}

}  // namespace

//---------------------------------------------------------------------------//
Kernel::Kernel(double beta) : beta_(beta)
{
    check_beta(beta);
}

double Kernel::from_squared_distance(std::uint64_t sq) const noexcept
{
    if (sq <= 1)
        return 1.0;
    return std::pow(static_cast<double>(sq), -0.5 * beta_);
}

double Kernel::operator()(LatticePoint const& x, LatticePoint const& y) const
{
    return from_squared_distance(squared_distance(x, y));
}

//---------------------------------------------------------------------------//
Measure::Measure(PointSet support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights))
{
    if (weights_.size() != support_.size())
        throw InvalidArgument("measure weights must align with support");
    if (support_.empty())
        throw InvalidArgument("measure support must be nonempty");
    stats::CompensatedSum s;
    for (double w : weights_)
    {
        if (!(w >= 0) || !std::isfinite(w))
            throw InvalidArgument("measure weights must be nonnegative");
        s.add(w);
    }
    if (std::abs(s.value() - 1.0) > 1e-12)
        throw InvalidArgument("measure weights must sum to 1");
}

Measure Measure::uniform(PointSet support)
{
    std::size_t const n = support.size();
    if (n == 0)
        throw InvalidArgument("uniform measure on an empty set");
    return Measure(std::move(support),
                   std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Measure Measure::dirac(int d, LatticePoint const& atom)
{
    return Measure(PointSet(d, {atom}), {1.0});
}

double Measure::weight_of(LatticePoint const& x) const
{
    auto idx = support_.index_of(x);
    return idx ? weights_[*idx] : 0.0;
}

char const* to_string(CapacityMethod m)
{
    switch (m)
    {
        case CapacityMethod::analytic:
            return "analytic";
        case CapacityMethod::linear_solve:
            return "linear_solve";
        case CapacityMethod::frank_wolfe:
            return "frank_wolfe";
        case CapacityMethod::brute_force:
            return "brute_force";
        case CapacityMethod::face_enumeration:
            return "face_enumeration";
    }
    return "?";
}

CapacityMethod parse_capacity_method(std::string_view s)
{
    for (auto m : {CapacityMethod::analytic, CapacityMethod::linear_solve,
                   CapacityMethod::frank_wolfe, CapacityMethod::brute_force,
                   CapacityMethod::face_enumeration})
    {
        if (s == to_string(m))
            return m;
    }
    throw ParseError("unknown capacity method '" + std::string(s) + "'");
}

//---------------------------------------------------------------------------//
double energy(Measure const& mu, double beta)
{
    check_beta(beta);
    Kernel const kernel(beta);
    auto const& pts = mu.support();
    stats::CompensatedSum s;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        double const wi = mu.weight(i);
        if (wi == 0)
            continue;
        stats::CompensatedSum row;
        for (std::size_t j = 0; j < pts.size(); ++j)
            row.add(kernel(pts[i], pts[j]) * mu.weight(j));
        s.add(wi * row.value());
    }
    return s.value();
}

std::vector<double> potentials(Measure const& mu, double beta)
{
    check_beta(beta);
    Matrix const k = build_kernel(mu.support(), beta);
    return mat_vec(k, mu.weights());
}

std::vector<double> kernel_matrix(PointSet const& a, double beta)
{
    check_beta(beta);
    Matrix const k = build_kernel(a, beta);
    return {k.data(), k.data() + k.size()};
}

CapacityResult capacity(PointSet const& a, double beta, double tol)
{
    CapacityOptions opt;
    opt.tol = tol;
    return capacity(a, beta, opt);
}

CapacityResult capacity(PointSet const& a, double beta,
                        CapacityOptions const& opt)
{
    check_beta(beta);
    if (a.empty())
        throw InvalidArgument("capacity of an empty set");
    if (!(opt.tol > 0))
        throw InvalidArgument("capacity tolerance must be positive");

    if (a.size() == 1)
        return make_result(a, {1.0}, 1.0, 0.0, 0, CapacityMethod::analytic, true);

    Matrix const k = build_kernel(a, beta);
    std::size_t const n = a.size();

    Eigen::LLT<Matrix> llt(k);
    if (llt.info() == Eigen::Success && llt.rcond() * opt.max_condition > 1.0)
    {
        Eigen::VectorXd sol = llt.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
        bool const nonneg = (sol.array() >= 0).all();
        if (nonneg)
        {
            std::vector<double> w(sol.data(), sol.data() + n);
            normalize(w);
            auto const g = mat_vec(k, w);
            double const f = quad_form(k, w);
            auto [fw_gap, pair_gap] = gaps(w, g, f);
            (void)pair_gap;
            return make_result(a, std::move(w), f, fw_gap, 1,
                               CapacityMethod::linear_solve, true);
        }
    }

    FwRun run = frank_wolfe(k, std::vector<double>(n, 1.0 / static_cast<double>(n)), opt);
    if (run.converged && n <= kEnumerateFacesMax)
    {
        // Minimizers need not be unique; keep the Frank-Wolfe one unless the
        // exhaustive search is strictly better.
        auto e = enumerate_faces(k);
        if (e && e->f < run.f * (1 - 1e-12))
            return make_result(a, std::move(e->w), e->f, e->gap, e->iterations,
                               CapacityMethod::face_enumeration, true);
    }
    else if (run.converged && n <= kLocalSearchMax)
    {
        // Second start: uniform on a greedy set of pairwise non-adjacent
        // points, where the kernel clamp no longer flattens the energy.
        std::vector<double> sparse(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
        {
            bool apart = true;
            for (std::size_t j = 0; j < i && apart; ++j)
                apart = sparse[j] == 0 || squared_distance(a[i], a[j]) >= 4;
            if (apart)
                sparse[i] = 1;
        }
        normalize(sparse);
        FwRun other = frank_wolfe(k, std::move(sparse), opt);
        other.iterations += run.iterations;
        if (other.converged && other.f < run.f)
            run = std::move(other);
        else
            run.iterations = other.iterations;
        local_search(k, run, opt, false);
        local_search(k, run, opt, true);
    }
    CapacityResult r = make_result(a, std::move(run.w), run.f, run.gap, run.iterations,
                                   CapacityMethod::frank_wolfe, run.converged);
    if (!r.converged)
    {
        throw CapacityNotConverged("Frank-Wolfe did not reach the requested gap in "
                                       + std::to_string(opt.max_iterations)
                                       + " iterations",
                                   std::move(r));
    }
    return r;
}

//---------------------------------------------------------------------------//
CapacityResult capacity_bruteforce(PointSet const& a, double beta, double grid_step)
{
    check_beta(beta);
    if (a.empty())
        throw InvalidArgument("capacity of an empty set");
    if (a.size() > 6)
        throw InvalidArgument("brute-force capacity supports at most 6 points");
    if (!(grid_step > 0) || grid_step > 1)
        throw InvalidArgument("grid step must lie in (0, 1]");

    std::size_t const n = a.size();
    if (n == 1)
        return make_result(a, {1.0}, 1.0, 0.0, 1, CapacityMethod::brute_force, true);

    Matrix const k = build_kernel(a, beta);
    auto const units_fine = static_cast<std::int64_t>(std::llround(1.0 / grid_step));
    std::int64_t evaluations = 0;

    auto eval = [&](std::vector<std::int64_t> const& c, std::int64_t units) {
        ++evaluations;
        double const inv = 1.0 / static_cast<double>(units);
        double f = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (c[i] == 0)
                continue;
            double row = 0;
            for (std::size_t j = 0; j < n; ++j)
                row += k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                       * static_cast<double>(c[j]);
            f += static_cast<double>(c[i]) * row;
        }
        return f * inv * inv;
    };

    // Stage 1: every composition of `coarse` units into n parts.
    constexpr std::uint64_t kBudget = 200000;
    std::int64_t coarse = 1;
    while (coarse < units_fine
           && binomial(static_cast<std::uint64_t>(coarse + 1) + n - 1, n - 1) <= kBudget)
    {
        ++coarse;
    }
    std::vector<std::int64_t> best(n, 0);
    double best_f = std::numeric_limits<double>::infinity();
    {
        std::vector<std::int64_t> c(n, 0);
        // Recursive enumeration via explicit stack of remaining mass.
        auto rec = [&](auto&& self, std::size_t i, std::int64_t left) -> void {
            if (i + 1 == n)
            {
                c[i] = left;
                double const f = eval(c, coarse);
                if (f < best_f)
                {
                    best_f = f;
                    best = c;
                }
                return;
            }
            for (std::int64_t x = 0; x <= left; ++x)
            {
                c[i] = x;
                self(self, i + 1, left - x);
            }
        };
        rec(rec, 0, coarse);
    }

    // Stage 2: local grids, refining by up to 4x per stage.
    std::int64_t units = coarse;
    while (units < units_fine)
    {
        std::int64_t const next = std::min(units_fine, units * 4);
        double const ratio = static_cast<double>(next) / static_cast<double>(units);
        auto const radius = static_cast<std::int64_t>(std::ceil(ratio)) + 1;
        std::vector<std::int64_t> center(n);
        for (std::size_t i = 0; i < n; ++i)
            center[i] = std::llround(static_cast<double>(best[i]) * ratio);

        std::vector<std::int64_t> c(n, 0);
        std::vector<std::int64_t> stage_best;
        double stage_f = std::numeric_limits<double>::infinity();
        auto rec = [&](auto&& self, std::size_t i, std::int64_t used) -> void {
            if (i + 1 == n)
            {
                c[i] = next - used;
                if (c[i] < 0)
                    return;
                double const f = eval(c, next);
                if (f < stage_f)
                {
                    stage_f = f;
                    stage_best = c;
                }
                return;
            }
            for (std::int64_t z = -radius; z <= radius; ++z)
            {
                c[i] = center[i] + z;
                if (c[i] < 0 || used + c[i] > next)
                    continue;
                self(self, i + 1, used + c[i]);
            }
        };
        rec(rec, 0, 0);
        best = stage_best;
        best_f = stage_f;
        units = next;
    }

    // Stage 3: single-unit transfers until no improvement.
    for (bool improved = true; improved;)
    {
        improved = false;
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < n; ++j)
            {
                if (i == j || best[i] == 0)
                    continue;
                --best[i];
                ++best[j];
                double const f = eval(best, units);
                if (f < best_f - 1e-15)
                {
                    best_f = f;
                    improved = true;
                }
                else
                {
                    ++best[i];
                    --best[j];
                }
            }
        }
    }

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = static_cast<double>(best[i]) / static_cast<double>(units);
    normalize(w);
    double const f = quad_form(k, w);
    auto const g = mat_vec(k, w);
    auto [fw_gap, pair_gap] = gaps(w, g, f);
    (void)pair_gap;
    return make_result(a, std::move(w), f, fw_gap, evaluations,
                       CapacityMethod::brute_force, true);
}

//---------------------------------------------------------------------------//
std::string format_capacity_result(CapacityResult const& r)
{
    std::string out;
    auto kv = [&](char const* key, std::string const& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };
    kv("value", format_double(r.value));
    kv("energy", format_double(r.energy));
    kv("duality_gap", format_double(r.duality_gap));
    kv("iterations", std::to_string(r.iterations));
    kv("method", to_string(r.method));
    kv("converged", r.converged ? "true" : "false");
    out += "# equilibrium\n";
    out += format_weighted_points(r.equilibrium.support(), r.equilibrium.weights());
    return out;
}

CapacityResult parse_capacity_result(std::string_view text)
{
    CapacityResult r;
    auto const marker = text.find("# equilibrium\n");
    if (marker == std::string_view::npos)
        throw ParseError("capacity result lacks an equilibrium block");
    std::string_view head = text.substr(0, marker);
    std::size_t pos = 0;
    while (pos < head.size())
    {
        auto nl = head.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = head.size();
        auto line = head.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected key=value, got '" + std::string(line) + "'");
        auto key = line.substr(0, eq);
        auto value = line.substr(eq + 1);
        if (key == "value")
            r.value = parse_double(value);
        else if (key == "energy")
            r.energy = parse_double(value);
        else if (key == "duality_gap")
            r.duality_gap = parse_double(value);
        else if (key == "iterations")
            r.iterations = std::stoll(std::string(value));
        else if (key == "method")
            r.method = parse_capacity_method(value);
        else if (key == "converged")
            r.converged = value == "true";
        else
            throw ParseError("unknown key '" + std::string(key) + "'");
    }
    auto eq = parse_weighted_points(text.substr(marker));
    r.equilibrium = Measure(std::move(eq.support), std::move(eq.weights));
    return r;
}

}  // namespace fracsum
