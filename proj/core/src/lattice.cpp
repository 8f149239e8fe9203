#include "fracsum/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "fracsum/errors.hpp"

namespace fracsum {
namespace {

void check_dim(int d)
{
    if (d < 1 || d > kMaxDim)
        throw InvalidArgument("dimension must lie in [1, 8], got "
                              + std::to_string(d));
}

void check_same_dim(int a, int b)
{
    if (a != b)
        throw DimensionMismatch("dimension mismatch: " + std::to_string(a)
                                + " vs " + std::to_string(b));
}

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw OverflowError("lattice coordinate overflow in addition");
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw OverflowError("lattice coordinate overflow in subtraction");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw OverflowError("lattice coordinate overflow in multiplication");
    return r;
}

std::uint64_t mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t slot_count_for(std::size_t n)
{
    return std::bit_ceil(std::max<std::size_t>(8, 2 * n + 1));
}

}  // namespace

//---------------------------------------------------------------------------//
LatticePoint::LatticePoint(int d) : dim_(d)
{
    check_dim(d);
}

LatticePoint::LatticePoint(std::initializer_list<std::int64_t> coords)
    : LatticePoint(std::span<std::int64_t const>(coords.begin(), coords.size()))
{
}

LatticePoint::LatticePoint(std::span<std::int64_t const> coords)
    : dim_(static_cast<int>(coords.size()))
{
    check_dim(dim_);
    std::copy(coords.begin(), coords.end(), coords_.begin());
}

LatticePoint LatticePoint::filled(int d, std::int64_t value)
{
    LatticePoint p(d);
    std::fill_n(p.coords_.begin(), d, value);
    return p;
}

LatticePoint LatticePoint::axis(int d, int axis, std::int64_t value)
{
    LatticePoint p(d);
    if (axis < 0 || axis >= d)
        throw InvalidArgument("axis out of range");
    p.coords_[axis] = value;
    return p;
}

LatticePoint LatticePoint::with(int axis, std::int64_t value) const
{
    if (axis < 0 || axis >= dim_)
        throw InvalidArgument("axis out of range");
    LatticePoint p = *this;
    p.coords_[axis] = value;
    return p;
}

LatticePoint LatticePoint::operator-() const
{
    LatticePoint r = *this;
    for (int i = 0; i < dim_; ++i)
        r.coords_[i] = checked_sub(0, coords_[i]);
    return r;
}

LatticePoint operator+(LatticePoint const& a, LatticePoint const& b)
{
    check_same_dim(a.dim_, b.dim_);
    LatticePoint r = a;
    for (int i = 0; i < a.dim_; ++i)
        r.coords_[i] = checked_add(a.coords_[i], b.coords_[i]);
    return r;
}

LatticePoint operator-(LatticePoint const& a, LatticePoint const& b)
{
    check_same_dim(a.dim_, b.dim_);
    LatticePoint r = a;
    for (int i = 0; i < a.dim_; ++i)
        r.coords_[i] = checked_sub(a.coords_[i], b.coords_[i]);
    return r;
}

LatticePoint LatticePoint::scaled(std::int64_t factor) const
{
    LatticePoint r = *this;
    for (int i = 0; i < dim_; ++i)
        r.coords_[i] = checked_mul(coords_[i], factor);
    return r;
}

std::size_t LatticePointHash::operator()(LatticePoint const& p) const noexcept
{
    std::uint64_t h = 0x9e3779b97f4a7c15ULL * static_cast<unsigned>(p.dim());
    for (int i = 0; i < p.dim(); ++i)
        h = mix(h ^ static_cast<std::uint64_t>(p[i]));
    return static_cast<std::size_t>(h);
}

std::uint64_t squared_distance(LatticePoint const& a, LatticePoint const& b)
{
    check_same_dim(a.dim(), b.dim());
    std::uint64_t total = 0;
    for (int i = 0; i < a.dim(); ++i)
    {
        std::int64_t diff = checked_sub(a[i], b[i]);
        std::uint64_t mag = diff < 0 ? 0 - static_cast<std::uint64_t>(diff)
                                     : static_cast<std::uint64_t>(diff);
        std::uint64_t sq;
        if (__builtin_mul_overflow(mag, mag, &sq)
            || __builtin_add_overflow(total, sq, &total))
        {
            throw OverflowError("squared distance overflow");
        }
    }
    return total;
}

double distance(LatticePoint const& a, LatticePoint const& b)
{
    return std::sqrt(static_cast<double>(squared_distance(a, b)));
}

double norm(LatticePoint const& a)
{
    return distance(a, LatticePoint(a.dim()));
}

//---------------------------------------------------------------------------//
bool Box::contains(LatticePoint const& x) const noexcept
{
    for (int i = 0; i < lo.dim(); ++i)
    {
        if (x[i] < lo[i] || x[i] > hi[i])
            return false;
    }
    return true;
}

bool Box::intersects(Box const& other) const noexcept
{
    for (int i = 0; i < lo.dim(); ++i)
    {
        if (other.hi[i] < lo[i] || other.lo[i] > hi[i])
            return false;
    }
    return true;
}

Box Box::operator+(Box const& other) const
{
    return {lo + other.lo, hi + other.hi};
}

Box Box::shifted(LatticePoint const& offset) const
{
    return {lo + offset, hi + offset};
}

Box Box::negated() const
{
    return {-hi, -lo};
}

std::uint64_t Box::volume() const
{
    std::uint64_t v = 1;
    for (int i = 0; i < lo.dim(); ++i)
    {
        if (hi[i] < lo[i])
            return 0;
        auto side = static_cast<std::uint64_t>(hi[i] - lo[i]) + 1;
        if (__builtin_mul_overflow(v, side, &v))
            throw OverflowError("box volume overflow");
    }
    return v;
}

//---------------------------------------------------------------------------//
PointSet::PointSet(int d) : dim_(d)
{
    check_dim(d);
}

PointSet::PointSet(int d, std::vector<LatticePoint> points) : dim_(d)
{
    check_dim(d);
    for (auto const& p : points)
        check_same_dim(d, p.dim());
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    points_ = std::move(points);
    build_index();
    compute_geometry();
}

PointSet::PointSet(int d, std::initializer_list<LatticePoint> points)
    : PointSet(d, std::vector<LatticePoint>(points))
{
}

PointSet::PointSet(Sorted, int d, std::vector<LatticePoint> points)
    : points_(std::move(points)), dim_(d)
{
    build_index();
    compute_geometry();
}

void PointSet::build_index()
{
    if (points_.size() >= 0xffffffffu)
        throw BudgetExceeded("point set too large to index");
    slots_.assign(slot_count_for(points_.size()), 0);
    std::size_t const mask = slots_.size() - 1;
    LatticePointHash hasher;
    for (std::size_t i = 0; i < points_.size(); ++i)
    {
        std::size_t s = hasher(points_[i]) & mask;
        while (slots_[s] != 0)
            s = (s + 1) & mask;
        slots_[s] = static_cast<std::uint32_t>(i + 1);
    }
}

void PointSet::compute_geometry()
{
    if (points_.empty())
        return;
    LatticePoint lo = points_.front();
    LatticePoint hi = points_.front();
    for (auto const& p : points_)
    {
        for (int i = 0; i < dim_; ++i)
        {
            if (p[i] < lo[i])
                lo = lo.with(i, p[i]);
            if (p[i] > hi[i])
                hi = hi.with(i, p[i]);
        }
    }
    bbox_ = {lo, hi};

    // A farthest pair consists of convex-hull vertices. Among points that
    // agree on the first d-1 coordinates (contiguous in sorted order) only
    // the two ends of the run can be hull vertices.
    std::vector<LatticePoint const*> candidates;
    auto same_prefix = [this](LatticePoint const& a, LatticePoint const& b) {
        for (int i = 0; i + 1 < dim_; ++i)
        {
            if (a[i] != b[i])
                return false;
        }
        return true;
    };
    for (std::size_t start = 0; start < points_.size();)
    {
        std::size_t stop = start + 1;
        while (stop < points_.size() && same_prefix(points_[start], points_[stop]))
            ++stop;
        candidates.push_back(&points_[start]);
        if (stop - 1 != start)
            candidates.push_back(&points_[stop - 1]);
        start = stop;
    }
    std::uint64_t best = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i)
    {
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
            best = std::max(best, squared_distance(*candidates[i], *candidates[j]));
    }
    sq_diam_ = best;
}

std::optional<std::size_t> PointSet::index_of(LatticePoint const& x) const noexcept
{
    if (slots_.empty() || x.dim() != dim_)
        return std::nullopt;
    std::size_t const mask = slots_.size() - 1;
    std::size_t s = LatticePointHash{}(x) & mask;
    while (slots_[s] != 0)
    {
        std::size_t idx = slots_[s] - 1;
        if (points_[idx] == x)
            return idx;
        s = (s + 1) & mask;
    }
    return std::nullopt;
}

bool PointSet::contains(LatticePoint const& x) const noexcept
{
    return index_of(x).has_value();
}

Box const& PointSet::bbox() const
{
    if (points_.empty())
        throw InvalidArgument("bounding box of an empty point set");
    return bbox_;
}

std::uint64_t PointSet::squared_diameter() const
{
    if (points_.empty())
        throw InvalidArgument("diameter of an empty point set");
    return sq_diam_;
}

double PointSet::diameter() const
{
    return std::sqrt(static_cast<double>(squared_diameter()));
}

bool PointSet::is_subset_of(PointSet const& other) const
{
    return std::all_of(points_.begin(), points_.end(),
                       [&](auto const& p) { return other.contains(p); });
}

PointSet PointSet::translated(LatticePoint const& offset) const
{
    check_same_dim(dim_, offset.dim());
    std::vector<LatticePoint> out;
    out.reserve(points_.size());
    for (auto const& p : points_)
        out.push_back(p + offset);
    // Translation preserves lexicographic order.
    return PointSet(Sorted{}, dim_, std::move(out));
}

PointSet PointSet::united(PointSet const& other) const
{
    check_same_dim(dim_, other.dim_);
    std::vector<LatticePoint> out;
    out.reserve(points_.size() + other.points_.size());
    std::set_union(points_.begin(), points_.end(), other.points_.begin(),
                   other.points_.end(), std::back_inserter(out));
    return PointSet(Sorted{}, dim_, std::move(out));
}

//---------------------------------------------------------------------------//
PointHashSet::PointHashSet(std::size_t expected)
{
    items_.reserve(expected);
    slots_.assign(slot_count_for(expected), 0);
}

void PointHashSet::grow()
{
    slots_.assign(slot_count_for(2 * items_.size() + 8), 0);
    std::size_t const mask = slots_.size() - 1;
    LatticePointHash hasher;
    for (std::size_t i = 0; i < items_.size(); ++i)
    {
        std::size_t s = hasher(items_[i]) & mask;
        while (slots_[s] != 0)
            s = (s + 1) & mask;
        slots_[s] = static_cast<std::uint32_t>(i + 1);
    }
}

bool PointHashSet::insert(LatticePoint const& x)
{
    if (slots_.empty() || 2 * (size_ + 1) > slots_.size())
        grow();
    std::size_t const mask = slots_.size() - 1;
    std::size_t s = LatticePointHash{}(x) & mask;
    while (slots_[s] != 0)
    {
        if (items_[slots_[s] - 1] == x)
            return false;
        s = (s + 1) & mask;
    }
    items_.push_back(x);
    slots_[s] = static_cast<std::uint32_t>(items_.size());
    ++size_;
    return true;
}

bool PointHashSet::contains(LatticePoint const& x) const noexcept
{
    if (slots_.empty())
        return false;
    std::size_t const mask = slots_.size() - 1;
    std::size_t s = LatticePointHash{}(x) & mask;
    while (slots_[s] != 0)
    {
        if (items_[slots_[s] - 1] == x)
            return true;
        s = (s + 1) & mask;
    }
    return false;
}

void PointHashSet::clear() noexcept
{
    items_.clear();
    std::fill(slots_.begin(), slots_.end(), 0);
    size_ = 0;
}

//---------------------------------------------------------------------------//
CenteredCube::CenteredCube(int d, int level) : dim_(d), level_(level)
{
    check_dim(d);
    if (level < 0 || level > 62)
        throw InvalidArgument("cube level must lie in [0, 62]");
}

std::int64_t CenteredCube::low() const noexcept
{
    return level_ == 0 ? 0 : -(std::int64_t{1} << (level_ - 1));
}

bool CenteredCube::contains(LatticePoint const& x) const noexcept
{
    if (x.dim() != dim_)
        return false;
    std::int64_t const lo = low();
    std::int64_t const hi = high();
    for (int i = 0; i < dim_; ++i)
    {
        if (x[i] < lo || x[i] > hi)
            return false;
    }
    return true;
}

std::uint64_t CenteredCube::size() const
{
    return box().volume();
}

Box CenteredCube::box() const
{
    return {LatticePoint::filled(dim_, low()), LatticePoint::filled(dim_, high())};
}

PointSet CenteredCube::points() const
{
    std::uint64_t const n = size();
    if (n > (std::uint64_t{1} << 26))
        throw BudgetExceeded("centered cube too large to enumerate");
    std::vector<LatticePoint> out;
    out.reserve(n);
    LatticePoint cur = LatticePoint::filled(dim_, low());
    std::int64_t const hi = high();
    // Odometer with the last axis fastest gives lexicographic order.
    for (std::uint64_t i = 0; i < n; ++i)
    {
        out.push_back(cur);
        for (int a = dim_ - 1; a >= 0; --a)
        {
            if (cur[a] < hi)
            {
                cur = cur.with(a, cur[a] + 1);
                break;
            }
            cur = cur.with(a, low());
        }
    }
    return PointSet(dim_, std::move(out));
}

//---------------------------------------------------------------------------//
PointSet minkowski_sum(PointSet const& a, PointSet const& b)
{
    check_same_dim(a.dim(), b.dim());
    std::vector<LatticePoint> out;
    out.reserve(a.size() * b.size());
    for (auto const& x : a)
    {
        for (auto const& y : b)
            out.push_back(x + y);
    }
    return PointSet(a.dim(), std::move(out));
}

PointSet negate(PointSet const& a)
{
    std::vector<LatticePoint> out;
    out.reserve(a.size());
    for (auto it = a.points().rbegin(); it != a.points().rend(); ++it)
        out.push_back(-*it);
    return PointSet(a.dim(), std::move(out));
}

PointSet minkowski_difference(PointSet const& a, PointSet const& b)
{
    return minkowski_sum(a, negate(b));
}

double diameter(PointSet const& a)
{
    return a.diameter();
}

}  // namespace fracsum
