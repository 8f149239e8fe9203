#pragma once

#include <cstdint>
#include <initializer_list>

namespace fracsum::rng {

//---------------------------------------------------------------------------//
// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Key for a labelled substream of `key`.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t label) noexcept
{
    return mix64(key ^ mix64(label * kGolden + 0x632be59bd9b4e019ULL));
}

// Hash a seed together with a list of integer coordinates (grid cells,
// trial indices).
constexpr std::uint64_t
derive(std::uint64_t key, std::initializer_list<std::uint64_t> labels) noexcept
{
    for (auto l : labels)
        key = derive(key, l);
    return key;
}

// Uniform double in [0, 1) from a 64-bit value.
constexpr double to_unit(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

//---------------------------------------------------------------------------//
/*!
 * Counter-based key of a node of a 2^d-ary tree.
 *
 * The key of a node is a pure function of the run seed and the letters on
 * its root path, so any traversal order (full, pruned, early exit) sees the
 * same coin for the same edge.
 */
class NodeKey
{
  public:
    constexpr NodeKey() = default;
    static constexpr NodeKey root(std::uint64_t seed) noexcept
    {
        return NodeKey{mix64(seed ^ 0x5851f42d4c957f2dULL)};
    }

    constexpr NodeKey child(unsigned letter) const noexcept
    {
        return NodeKey{
            mix64(value_ + (static_cast<std::uint64_t>(letter) + 1) * kGolden)};
    }

    // Uniform variate attached to the edge entering this node.
    constexpr double edge_uniform() const noexcept
    {
        return to_unit(mix64(value_ ^ 0xd6e8feb86659fd93ULL));
    }

    constexpr std::uint64_t value() const noexcept { return value_; }

  private:
    constexpr explicit NodeKey(std::uint64_t v) : value_(v) {}
    std::uint64_t value_ = 0;
};

//---------------------------------------------------------------------------//
/*!
 * Sequential SplitMix64 stream. Two streams with the same seed produce the
 * same prefix, which couples walks of different truncation lengths.
 */
class SplitMix64
{
  public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t operator()() noexcept
    {
        state_ += kGolden;
        return mix64(state_);
    }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    // Uniform integer in [0, n) by multiply-shift (Lemire, no rejection).
    std::uint64_t below(std::uint64_t n) noexcept
    {
        __extension__ using Wide = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<Wide>((*this)()) * n) >> 64);
    }

    double uniform() noexcept { return to_unit((*this)()); }

  private:
    std::uint64_t state_;
};

}  // namespace fracsum::rng
