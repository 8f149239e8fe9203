#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace fracsum {

inline constexpr int kMaxDim = 8;

//---------------------------------------------------------------------------//
/*!
 * A point of Z^d with 1 <= d <= 8.
 *
 * Coordinates live in fixed storage; unused trailing slots are always zero so
 * that comparison and hashing can look at the whole array. Arithmetic is
 * overflow-checked and throws OverflowError.
 */
class LatticePoint
{
  public:
    using Coords = std::array<std::int64_t, kMaxDim>;

    LatticePoint() = default;

    // Origin of Z^d.
    explicit LatticePoint(int d);
    LatticePoint(std::initializer_list<std::int64_t> coords);
    explicit LatticePoint(std::span<std::int64_t const> coords);

    // All coordinates equal to `value`.
    static LatticePoint filled(int d, std::int64_t value);
    // `value` on `axis`, zero elsewhere.
    static LatticePoint axis(int d, int axis, std::int64_t value);

    int dim() const noexcept { return dim_; }
    std::int64_t operator[](int i) const noexcept { return coords_[i]; }
    std::span<std::int64_t const> coords() const noexcept
    {
        return {coords_.data(), static_cast<std::size_t>(dim_)};
    }

    // Copy with one coordinate replaced.
    LatticePoint with(int axis, std::int64_t value) const;

    LatticePoint operator-() const;
    friend LatticePoint operator+(LatticePoint const& a, LatticePoint const& b);
    friend LatticePoint operator-(LatticePoint const& a, LatticePoint const& b);
    // Multiply every coordinate by `factor`.
    LatticePoint scaled(std::int64_t factor) const;

    friend bool operator==(LatticePoint const&, LatticePoint const&) = default;
    friend std::strong_ordering
    operator<=>(LatticePoint const& a, LatticePoint const& b) noexcept
    {
        if (auto c = a.dim_ <=> b.dim_; c != 0)
            return c;
        return a.coords_ <=> b.coords_;
    }

  private:
    Coords coords_{};
    int dim_ = 0;
};

struct LatticePointHash
{
    std::size_t operator()(LatticePoint const& p) const noexcept;
};

// Exact squared Euclidean distance; throws OverflowError if it does not fit.
std::uint64_t squared_distance(LatticePoint const& a, LatticePoint const& b);
double distance(LatticePoint const& a, LatticePoint const& b);
double norm(LatticePoint const& a);

//---------------------------------------------------------------------------//
//! Closed integer box [lo, hi] per axis.
struct Box
{
    LatticePoint lo;
    LatticePoint hi;

    int dim() const noexcept { return lo.dim(); }
    bool contains(LatticePoint const& x) const noexcept;
    bool intersects(Box const& other) const noexcept;
    // Minkowski sum of two boxes.
    Box operator+(Box const& other) const;
    // Translate by a point.
    Box shifted(LatticePoint const& offset) const;
    // {-x : x in box}
    Box negated() const;
    std::uint64_t volume() const;
};

//---------------------------------------------------------------------------//
/*!
 * Finite, immutable set of lattice points of one dimension.
 *
 * Points are kept in lexicographic order, which fixes iteration order for
 * everything downstream. Membership goes through an open-addressing index.
 * The bounding box and exact squared diameter are computed at construction.
 */
class PointSet
{
  public:
    using const_iterator = std::vector<LatticePoint>::const_iterator;

    PointSet() = default;
    // Empty set in Z^d.
    explicit PointSet(int d);
    // Sorts and deduplicates; all points must have dimension d.
    PointSet(int d, std::vector<LatticePoint> points);
    PointSet(int d, std::initializer_list<LatticePoint> points);

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const_iterator begin() const noexcept { return points_.begin(); }
    const_iterator end() const noexcept { return points_.end(); }
    LatticePoint const& operator[](std::size_t i) const { return points_[i]; }
    std::span<LatticePoint const> points() const noexcept { return points_; }

    bool contains(LatticePoint const& x) const noexcept;
    std::optional<std::size_t> index_of(LatticePoint const& x) const noexcept;

    // Throws InvalidArgument on an empty set.
    Box const& bbox() const;
    std::uint64_t squared_diameter() const;
    double diameter() const;

    bool is_subset_of(PointSet const& other) const;
    PointSet translated(LatticePoint const& offset) const;
    PointSet united(PointSet const& other) const;

    friend bool operator==(PointSet const& a, PointSet const& b)
    {
        return a.dim_ == b.dim_ && a.points_ == b.points_;
    }

  private:
    struct Sorted
    {
    };
    PointSet(Sorted, int d, std::vector<LatticePoint> points);
    void build_index();
    void compute_geometry();

    std::vector<LatticePoint> points_;
    std::vector<std::uint32_t> slots_;
    Box bbox_;
    std::uint64_t sq_diam_ = 0;
    int dim_ = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Insert-only hash set of lattice points, for hot loops (walk ranges,
 * difference sets) where building a sorted PointSet per trial is wasteful.
 */
class PointHashSet
{
  public:
    PointHashSet() = default;
    explicit PointHashSet(std::size_t expected);

    // Returns true if newly inserted.
    bool insert(LatticePoint const& x);
    bool contains(LatticePoint const& x) const noexcept;
    std::size_t size() const noexcept { return size_; }
    void clear() noexcept;
    // Elements in insertion order.
    std::span<LatticePoint const> items() const noexcept { return items_; }

  private:
    void grow();

    std::vector<LatticePoint> items_;
    std::vector<std::uint32_t> slots_;  // index + 1, 0 = empty
    std::size_t size_ = 0;
};

//---------------------------------------------------------------------------//
/*!
 * The centered cube Delta_k = [-2^{k-1}, 2^{k-1})^d of side 2^k.
 * Delta_0 is {0}.
 */
class CenteredCube
{
  public:
    CenteredCube(int d, int level);

    int dim() const noexcept { return dim_; }
    int level() const noexcept { return level_; }
    std::int64_t side() const noexcept { return std::int64_t{1} << level_; }
    // Lowest coordinate on each axis (0 when level is 0).
    std::int64_t low() const noexcept;
    std::int64_t high() const noexcept { return low() + side() - 1; }

    bool contains(LatticePoint const& x) const noexcept;
    std::uint64_t size() const;
    Box box() const;
    PointSet points() const;

  private:
    int dim_;
    int level_;
};

//---------------------------------------------------------------------------//
PointSet minkowski_sum(PointSet const& a, PointSet const& b);
PointSet negate(PointSet const& a);
// A + negate(B)
PointSet minkowski_difference(PointSet const& a, PointSet const& b);
double diameter(PointSet const& a);

}  // namespace fracsum
