#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracsum/lattice.hpp"

namespace fracsum {

//---------------------------------------------------------------------------//
/*!
 * Parameters of the discrete fractal percolation Q_d(p; k): k rounds of
 * dyadic subdivision of Delta_k, each sub-cube kept with probability p.
 */
struct PercolationParams
{
    int d = 1;
    double p = 0.5;
    int level = 0;

    // Throws InvalidArgument unless 1 <= d <= 8, 0 < p < 1, 0 <= level and
    // d * level <= 62 (leaf indices must fit in 64 bits).
    void validate() const;

    // p > 2^{-d}: the cube-count branching process is supercritical.
    bool supercritical() const noexcept;
    // Mean number of kept children per cube, 2^d p.
    double offspring_mean() const noexcept;
};

//---------------------------------------------------------------------------//
/*!
 * A word over the alphabet {0,1}^d, i.e. a vertex of the 2^d-ary tree.
 *
 * Letters are encoded as integers with axis 0 in the most significant bit,
 * so integer order on letters is lexicographic order on {0,1}^d and integer
 * order on leaf indices is lexicographic order on words.
 */
class TreeWord
{
  public:
    TreeWord(int d, std::vector<std::uint8_t> letters);
    // The root.
    explicit TreeWord(int d);
    // Leaf word of a point of Delta_k.
    static TreeWord of_point(LatticePoint const& x, int k);
    // Leaf word from its 0-based lexicographic index.
    static TreeWord of_leaf_index(int d, int k, std::uint64_t index);

    int dim() const noexcept { return d_; }
    std::size_t length() const noexcept { return letters_.size(); }
    std::uint8_t letter(std::size_t i) const { return letters_[i]; }
    std::span<std::uint8_t const> letters() const noexcept { return letters_; }
    // Bit of the i-th letter on `axis` (0 or 1).
    int bit(std::size_t i, int axis) const;

    TreeWord child(std::uint8_t letter) const;
    TreeWord prefix(std::size_t length) const;
    // Index among words of the same length in lexicographic order.
    std::uint64_t index() const;

    friend bool operator==(TreeWord const&, TreeWord const&) = default;
    friend auto operator<=>(TreeWord const& a, TreeWord const& b)
    {
        return a.letters_ <=> b.letters_;
    }

  private:
    int d_;
    std::vector<std::uint8_t> letters_;
};

// Dyadic block of Delta_k: corner + [0, side)^d.
struct DyadicBlock
{
    LatticePoint corner;
    std::int64_t side = 1;

    bool contains(LatticePoint const& x) const noexcept;
    Box box() const;
};

/*!
 * Block of Delta_k encoded by a word of length j <= k:
 * corner -2^{k-1} 1_d + sum_i 2^{k-i} theta_i, side 2^{k-j}. The words of
 * length j tile Delta_k.
 */
DyadicBlock word_to_cube(TreeWord const& w, int k);

// 0-based lexicographic leaf index of x in Delta_k (Morton order with axis 0
// most significant within each letter).
std::uint64_t leaf_index(LatticePoint const& x, int k);
LatticePoint leaf_point(int d, int k, std::uint64_t index);

//---------------------------------------------------------------------------//
/*!
 * Realized Q_d(p; k).
 *
 * Edge coins are pure functions of (seed, root path), so a pruned sample
 * agrees with the full sample of the same seed wherever it was expanded.
 */
struct PercolationSample
{
    PercolationParams params;
    PointSet survivors;
    std::uint64_t seed = 0;
    // Set for pruned samples: the declared target and partner box.
    std::optional<PointSet> pruned_against;
    std::optional<Box> partner_box;
    // Open-path subtrees that were not expanded by a pruned sampler.
    std::vector<DyadicBlock> unresolved;

    bool is_pruned() const noexcept { return pruned_against.has_value(); }
};

// Whether the edge entering the node reached by `path` from the root is open.
bool edge_open(std::uint64_t seed, std::span<std::uint8_t const> path, double p);

PercolationSample sample(PercolationParams const& params, std::uint64_t seed);

/*!
 * Expands only subtrees whose block, Minkowski-summed with `partner_box`,
 * meets `target`. Survivors are exactly the full-sample survivors x with
 * (x + partner_box) ∩ target nonempty.
 */
PercolationSample sample_pruned(PercolationParams const& params,
                                std::uint64_t seed, PointSet const& target,
                                std::optional<Box> const& partner_box = std::nullopt);

// Allocation-light form of sample_pruned for hot loops: appends survivors
// (in leaf order) to `out` without building a PointSet.
void collect_pruned_survivors(PercolationParams const& params, std::uint64_t seed,
                              std::span<LatticePoint const> target,
                              std::optional<Box> const& partner_box,
                              std::vector<LatticePoint>& out);

/*!
 * Target prepared for tree descent: sorted unique leaf indices of the
 * target points inside Delta_k.
 */
class LeafTarget
{
  public:
    LeafTarget(int d, int k) : d_(d), k_(k) {}
    LeafTarget(int d, int k, std::span<LatticePoint const> points);

    void assign(std::span<LatticePoint const> points);
    void insert_unsorted(LatticePoint const& x);
    // Sort and deduplicate after insert_unsorted calls.
    void finalize();
    void clear() noexcept { leaves_.clear(); }

    int dim() const noexcept { return d_; }
    int level() const noexcept { return k_; }
    bool empty() const noexcept { return leaves_.empty(); }
    std::span<std::uint64_t const> leaves() const noexcept { return leaves_; }

  private:
    int d_;
    int k_;
    std::vector<std::uint64_t> leaves_;
};

// Does Q_d(p; k) for this seed meet the target? Early-exit descent; equal to
// !(sample(params, seed).survivors ∩ target).empty().
bool hits(PercolationParams const& params, std::uint64_t seed,
          LeafTarget const& target);

/*!
 * Exact P(Q_d(p; k) ∩ A ≠ ∅) by the tree recursion
 * h(leaf) = 1_{leaf in A}, h(v) = 1 - prod_children (1 - p h(child)),
 * restricted to blocks meeting A. Points outside Delta_k are ignored.
 */
double hit_probability_exact(PercolationParams const& params, PointSet const& a);
double hit_probability_exact(PercolationParams const& params, LeafTarget const& a);

// Survival probabilities s_0..s_k, s_0 = 1, s_{j+1} = 1 - (1 - p s_j)^{2^d}.
std::vector<double> survival_recursion(int d, double p, int k);

struct PairProbability
{
    int height = 0;       // distance from each leaf to the common ancestor
    double exact = 0;     // p^{k + height}
    double bound = 0;     // p^{k + log2|x-y| - log2(d)/2}; +inf when x = y
};

PairProbability pair_probability(PercolationParams const& params,
                                 LatticePoint const& x, LatticePoint const& y);

//---------------------------------------------------------------------------//
//! Edge indicators y_1..y_k along the root path to one leaf; y_1 is bit 0.
struct LeafChainState
{
    std::uint64_t bits = 0;
    int length = 0;

    int bit(int j) const noexcept { return static_cast<int>((bits >> (j - 1)) & 1u); }
    bool all_open() const noexcept;
    friend bool operator==(LeafChainState const&, LeafChainState const&) = default;
};

// Y_1 .. Y_{2^{dk}} in lexicographic leaf order. Rejects pruned samples.
std::vector<LeafChainState> leaf_chain(PercolationSample const& sample);

//! Row-stochastic matrix over {0,1}^k; state s encodes y_j as bit j-1.
struct TransitionMatrix
{
    int length = 0;
    std::vector<double> entries;

    std::size_t states() const noexcept { return std::size_t{1} << length; }
    double operator()(std::uint64_t from, std::uint64_t to) const
    {
        return entries[from * states() + to];
    }
};

// Number of leading letters shared by leaves i and i+1 (1-based i).
int shared_prefix(PercolationParams const& params, std::uint64_t i);

/*!
 * One-step kernel Y_i -> Y_{i+1} (1-based i < 2^{dk}): bits on the prefix
 * shared by u_i and u_{i+1} are copied, the rest are fresh Bernoulli(p).
 */
TransitionMatrix chain_transition_kernel(PercolationParams const& params,
                                         std::uint64_t i);

struct ChainTestResult
{
    std::uint64_t index = 0;
    std::uint64_t trees = 0;
    double statistic = 0;
    double dof = 0;
    double p_value = 1;
};

/*!
 * Pearson chi-square test of empirical Y_i -> Y_{i+1} transitions over
 * `trees` sampled trees against chain_transition_kernel. Cells with
 * expected count below 5 are pooled into one.
 */
ChainTestResult chain_test(PercolationParams const& params, std::uint64_t i,
                           std::uint64_t trees, std::uint64_t seed);

// Header (d, p, k, seed) followed by the survivors in point-set format.
std::string format_sample(PercolationSample const& s);
PercolationSample parse_sample(std::string_view text);

}  // namespace fracsum
