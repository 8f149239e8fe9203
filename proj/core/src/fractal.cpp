#include "fracsum/fractal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "fracsum/errors.hpp"
#include "fracsum/rng.hpp"
#include "fracsum/stats.hpp"
#include "fracsum/text_format.hpp"

namespace fracsum {
namespace {

constexpr std::uint64_t kLeafBudget = std::uint64_t{1} << 24;

std::int64_t cube_low(int k)
{
    return k == 0 ? 0 : -(std::int64_t{1} << (k - 1));
}

void check_in_cube(LatticePoint const& x, int d, int k)
{
    if (x.dim() != d)
        throw DimensionMismatch("point dimension does not match the tree");
    if (!CenteredCube(d, k).contains(x))
        throw InvalidArgument("point lies outside Delta_k");
}

// Corner offset of child `letter` below a block of side 2^{half_shift + 1}.
LatticePoint child_corner(LatticePoint const& corner, unsigned letter, int d,
                          std::int64_t half)
{
    LatticePoint c = corner;
    for (int a = 0; a < d; ++a)
    {
        if ((letter >> (d - 1 - a)) & 1u)
            c = c.with(a, c[a] + half);
    }
    return c;
}

// Height of the common ancestor above two distinct leaves.
int ancestor_height(std::uint64_t a, std::uint64_t b, int d)
{
    if (a == b)
        return 0;
    int const top = 63 - std::countl_zero(a ^ b);
    return top / d + 1;
}

//---------------------------------------------------------------------------//
struct PrunedWalker
{
    PercolationParams const& params;
    std::span<LatticePoint const> target;
    std::optional<Box> const& partner;
    std::vector<LatticePoint>& out;
    std::vector<DyadicBlock>* unresolved;

    bool relevant(LatticePoint const& corner, std::int64_t side,
                  LatticePoint const& t) const
    {
        for (int a = 0; a < params.d; ++a)
        {
            std::int64_t lo = corner[a];
            std::int64_t hi = corner[a] + side - 1;
            if (partner)
            {
                lo += partner->lo[a];
                hi += partner->hi[a];
            }
            if (t[a] < lo || t[a] > hi)
                return false;
        }
        return true;
    }

    void visit(rng::NodeKey key, LatticePoint const& corner, int depth,
               std::vector<std::uint32_t> const& live)
    {
        int const k = params.level;
        if (depth == k)
        {
            out.push_back(corner);
            return;
        }
        std::int64_t const half = std::int64_t{1} << (k - depth - 1);
        unsigned const letters = 1u << params.d;
        std::vector<std::uint32_t> child_live;
        for (unsigned letter = 0; letter < letters; ++letter)
        {
            rng::NodeKey const ck = key.child(letter);
            if (!(ck.edge_uniform() < params.p))
                continue;
            LatticePoint const cc = child_corner(corner, letter, params.d, half);
            child_live.clear();
            for (auto idx : live)
            {
                if (relevant(cc, half, target[idx]))
                    child_live.push_back(idx);
            }
            if (child_live.empty())
            {
                if (unresolved)
                    unresolved->push_back({cc, half});
                continue;
            }
            visit(ck, cc, depth + 1, child_live);
        }
    }
};

struct HitWalker
{
    int d;
    int k;
    double p;
    std::span<std::uint64_t const> leaves;

    bool visit(rng::NodeKey key, int depth, std::size_t lo, std::size_t hi) const
    {
        if (depth == k)
            return true;
        int const shift = d * (k - depth - 1);
        std::uint64_t const mask = (std::uint64_t{1} << d) - 1;
        std::size_t i = lo;
        while (i < hi)
        {
            auto const letter = static_cast<unsigned>((leaves[i] >> shift) & mask);
            std::size_t j = i + 1;
            while (j < hi && ((leaves[j] >> shift) & mask) == letter)
                ++j;
            rng::NodeKey const ck = key.child(letter);
            if (ck.edge_uniform() < p && visit(ck, depth + 1, i, j))
                return true;
            i = j;
        }
        return false;
    }
};

struct ExactWalker
{
    int d;
    int k;
    double p;
    std::span<std::uint64_t const> leaves;

    double visit(int depth, std::size_t lo, std::size_t hi) const
    {
        if (depth == k)
            return 1.0;
        int const shift = d * (k - depth - 1);
        std::uint64_t const mask = (std::uint64_t{1} << d) - 1;
        // acc = 1 - prod (1 - x_c), accumulated as acc + x (1 - acc), which
        // has no cancellation when the probabilities are small.
        double acc = 0;
        std::size_t i = lo;
        while (i < hi)
        {
            auto const letter = (leaves[i] >> shift) & mask;
            std::size_t j = i + 1;
            while (j < hi && ((leaves[j] >> shift) & mask) == letter)
                ++j;
            double const x = p * visit(depth + 1, i, j);
            acc = acc + x * (1.0 - acc);
            i = j;
        }
        return acc;
    }
};

}  // namespace

//---------------------------------------------------------------------------//
void PercolationParams::validate() const
{
    if (d < 1 || d > kMaxDim)
        throw InvalidArgument("percolation dimension must lie in [1, 8]");
    if (!(p > 0 && p < 1))
        throw InvalidArgument("percolation parameter p must lie in (0, 1)");
    if (level < 0 || d * level > 62)
        throw InvalidArgument("percolation level must satisfy 0 <= k and d*k <= 62");
}

bool PercolationParams::supercritical() const noexcept
{
    return offspring_mean() > 1.0;
}

double PercolationParams::offspring_mean() const noexcept
{
    return std::ldexp(p, d);
}

//---------------------------------------------------------------------------//
TreeWord::TreeWord(int d) : d_(d)
{
    if (d < 1 || d > kMaxDim)
        throw InvalidArgument("word dimension must lie in [1, 8]");
}

TreeWord::TreeWord(int d, std::vector<std::uint8_t> letters)
    : d_(d), letters_(std::move(letters))
{
    if (d < 1 || d > kMaxDim)
        throw InvalidArgument("word dimension must lie in [1, 8]");
    for (auto l : letters_)
    {
        if (static_cast<unsigned>(l) >= (1u << d))
            throw InvalidArgument("letter has more than d bits");
    }
}

TreeWord TreeWord::of_point(LatticePoint const& x, int k)
{
    return of_leaf_index(x.dim(), k, leaf_index(x, k));
}

TreeWord TreeWord::of_leaf_index(int d, int k, std::uint64_t index)
{
    std::vector<std::uint8_t> letters(static_cast<std::size_t>(k));
    std::uint64_t const mask = (std::uint64_t{1} << d) - 1;
    for (int i = k - 1; i >= 0; --i)
    {
        letters[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index & mask);
        index >>= d;
    }
    return TreeWord(d, std::move(letters));
}

int TreeWord::bit(std::size_t i, int axis) const
{
    return (letters_.at(i) >> (d_ - 1 - axis)) & 1;
}

TreeWord TreeWord::child(std::uint8_t letter) const
{
    auto letters = letters_;
    letters.push_back(letter);
    return TreeWord(d_, std::move(letters));
}

TreeWord TreeWord::prefix(std::size_t length) const
{
    if (length > letters_.size())
        throw InvalidArgument("prefix longer than word");
    return TreeWord(d_, {letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(length)});
}

std::uint64_t TreeWord::index() const
{
    if (static_cast<std::size_t>(d_) * letters_.size() > 64)
        throw OverflowError("word index exceeds 64 bits");
    std::uint64_t idx = 0;
    for (auto l : letters_)
        idx = (idx << d_) | l;
    return idx;
}

bool DyadicBlock::contains(LatticePoint const& x) const noexcept
{
    for (int a = 0; a < corner.dim(); ++a)
    {
        if (x[a] < corner[a] || x[a] >= corner[a] + side)
            return false;
    }
    return true;
}

Box DyadicBlock::box() const
{
    return {corner, corner + LatticePoint::filled(corner.dim(), side - 1)};
}

DyadicBlock word_to_cube(TreeWord const& w, int k)
{
    auto const j = static_cast<int>(w.length());
    if (j > k)
        throw InvalidArgument("word longer than tree height");
    if (k > 62)
        throw InvalidArgument("tree height too large");
    int const d = w.dim();
    LatticePoint corner = LatticePoint::filled(d, cube_low(k));
    for (int i = 1; i <= j; ++i)
    {
        std::int64_t const step = std::int64_t{1} << (k - i);
        corner = child_corner(corner, w.letter(static_cast<std::size_t>(i - 1)), d, step);
    }
    return {corner, std::int64_t{1} << (k - j)};
}

std::uint64_t leaf_index(LatticePoint const& x, int k)
{
    int const d = x.dim();
    if (d * k > 64)
        throw OverflowError("leaf index exceeds 64 bits");
    check_in_cube(x, d, k);
    std::uint64_t idx = 0;
    std::int64_t const low = cube_low(k);
    for (int i = k - 1; i >= 0; --i)
    {
        std::uint64_t letter = 0;
        for (int a = 0; a < d; ++a)
        {
            auto const u = static_cast<std::uint64_t>(x[a] - low);
            letter = (letter << 1) | ((u >> i) & 1u);
        }
        idx = (idx << d) | letter;
    }
    return idx;
}

LatticePoint leaf_point(int d, int k, std::uint64_t index)
{
    LatticePoint::Coords u{};
    for (int i = 0; i < k; ++i)
    {
        for (int a = d - 1; a >= 0; --a)
        {
            u[a] |= static_cast<std::int64_t>(index & 1u) << i;
            index >>= 1;
        }
    }
    std::int64_t const low = cube_low(k);
    for (int a = 0; a < d; ++a)
        u[a] += low;
    return LatticePoint(std::span<std::int64_t const>(u.data(), d));
}

//---------------------------------------------------------------------------//
bool edge_open(std::uint64_t seed, std::span<std::uint8_t const> path, double p)
{
    if (path.empty())
        throw InvalidArgument("the root has no entering edge");
    auto key = rng::NodeKey::root(seed);
    for (auto l : path)
        key = key.child(l);
    return key.edge_uniform() < p;
}

PercolationSample sample(PercolationParams const& params, std::uint64_t seed)
{
    params.validate();
    std::vector<LatticePoint> out;
    int const d = params.d;
    int const k = params.level;
    unsigned const letters = 1u << d;

    auto rec = [&](auto&& self, rng::NodeKey key, LatticePoint const& corner,
                   int depth) -> void {
        if (depth == k)
        {
            out.push_back(corner);
            return;
        }
        std::int64_t const half = std::int64_t{1} << (k - depth - 1);
        for (unsigned letter = 0; letter < letters; ++letter)
        {
            auto const ck = key.child(letter);
            if (ck.edge_uniform() < params.p)
                self(self, ck, child_corner(corner, letter, d, half), depth + 1);
        }
    };
    rec(rec, rng::NodeKey::root(seed), LatticePoint::filled(d, cube_low(k)), 0);

    PercolationSample s;
    s.params = params;
    s.seed = seed;
    s.survivors = PointSet(d, std::move(out));
    return s;
}

void collect_pruned_survivors(PercolationParams const& params, std::uint64_t seed,
                              std::span<LatticePoint const> target,
                              std::optional<Box> const& partner_box,
                              std::vector<LatticePoint>& out)
{
    PrunedWalker walker{params, target, partner_box, out, nullptr};
    LatticePoint const root = LatticePoint::filled(params.d, cube_low(params.level));
    std::vector<std::uint32_t> live;
    for (std::size_t i = 0; i < target.size(); ++i)
    {
        if (walker.relevant(root, std::int64_t{1} << params.level, target[i]))
            live.push_back(static_cast<std::uint32_t>(i));
    }
    if (!live.empty())
        walker.visit(rng::NodeKey::root(seed), root, 0, live);
}

PercolationSample sample_pruned(PercolationParams const& params,
                                std::uint64_t seed, PointSet const& target,
                                std::optional<Box> const& partner_box)
{
    params.validate();
    if (target.empty())
        throw InvalidArgument("pruning target must be nonempty");
    if (target.dim() != params.d || (partner_box && partner_box->dim() != params.d))
        throw DimensionMismatch("pruning target dimension mismatch");

    PercolationSample s;
    s.params = params;
    s.seed = seed;
    s.pruned_against = target;
    s.partner_box = partner_box;

    std::vector<LatticePoint> out;
    PrunedWalker walker{params, target.points(), partner_box, out, &s.unresolved};
    LatticePoint const root = LatticePoint::filled(params.d, cube_low(params.level));
    std::vector<std::uint32_t> live;
    for (std::size_t i = 0; i < target.size(); ++i)
    {
        if (walker.relevant(root, std::int64_t{1} << params.level, target[i]))
            live.push_back(static_cast<std::uint32_t>(i));
    }
    if (live.empty())
        s.unresolved.push_back({root, std::int64_t{1} << params.level});
    else
        walker.visit(rng::NodeKey::root(seed), root, 0, live);
    s.survivors = PointSet(params.d, std::move(out));
    return s;
}

//---------------------------------------------------------------------------//
LeafTarget::LeafTarget(int d, int k, std::span<LatticePoint const> points)
    : d_(d), k_(k)
{
    assign(points);
}

void LeafTarget::assign(std::span<LatticePoint const> points)
{
    leaves_.clear();
    for (auto const& x : points)
        insert_unsorted(x);
    finalize();
}

void LeafTarget::insert_unsorted(LatticePoint const& x)
{
    std::int64_t const low = cube_low(k_);
    std::int64_t const high = low + (std::int64_t{1} << k_) - 1;
    for (int a = 0; a < d_; ++a)
    {
        if (x[a] < low || x[a] > high)
            return;
    }
    leaves_.push_back(leaf_index(x, k_));
}

void LeafTarget::finalize()
{
    std::sort(leaves_.begin(), leaves_.end());
    leaves_.erase(std::unique(leaves_.begin(), leaves_.end()), leaves_.end());
}

bool hits(PercolationParams const& params, std::uint64_t seed,
          LeafTarget const& target)
{
    if (target.empty())
        return false;
    HitWalker const w{params.d, params.level, params.p, target.leaves()};
    return w.visit(rng::NodeKey::root(seed), 0, 0, target.leaves().size());
}

double hit_probability_exact(PercolationParams const& params, LeafTarget const& a)
{
    params.validate();
    if (a.empty())
        return 0.0;
    ExactWalker const w{params.d, params.level, params.p, a.leaves()};
    return w.visit(0, 0, a.leaves().size());
}

double hit_probability_exact(PercolationParams const& params, PointSet const& a)
{
    params.validate();
    if (!a.empty() && a.dim() != params.d)
        throw DimensionMismatch("target dimension does not match percolation");
    return hit_probability_exact(params, LeafTarget(params.d, params.level, a.points()));
}

std::vector<double> survival_recursion(int d, double p, int k)
{
    std::vector<double> s(static_cast<std::size_t>(k) + 1);
    s[0] = 1.0;
    double const children = std::ldexp(1.0, d);
    for (int j = 0; j < k; ++j)
        s[j + 1] = -std::expm1(children * std::log1p(-p * s[j]));
    return s;
}

PairProbability pair_probability(PercolationParams const& params,
                                 LatticePoint const& x, LatticePoint const& y)
{
    params.validate();
    check_in_cube(x, params.d, params.level);
    check_in_cube(y, params.d, params.level);
    PairProbability r;
    r.height = ancestor_height(leaf_index(x, params.level),
                               leaf_index(y, params.level), params.d);
    r.exact = std::pow(params.p, params.level + r.height);
    if (x == y)
    {
        r.bound = std::numeric_limits<double>::infinity();
    }
    else
    {
        double const expo = params.level + std::log2(distance(x, y))
                            - 0.5 * std::log2(static_cast<double>(params.d));
        r.bound = std::pow(params.p, expo);
    }
    return r;
}

//---------------------------------------------------------------------------//
bool LeafChainState::all_open() const noexcept
{
    return bits == (length == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1);
}

std::vector<LeafChainState> leaf_chain(PercolationSample const& s)
{
    if (s.is_pruned())
        throw InvalidArgument("leaf chain requires an unpruned sample");
    auto const& params = s.params;
    params.validate();
    int const d = params.d;
    int const k = params.level;
    if (static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(k) > 24)
        throw BudgetExceeded("leaf chain limited to 2^24 leaves");
    std::vector<LeafChainState> states(std::size_t{1} << (d * k));
    unsigned const letters = 1u << d;

    auto rec = [&](auto&& self, rng::NodeKey key, std::uint64_t prefix, int depth,
                   std::uint64_t bits) -> void {
        if (depth == k)
        {
            states[prefix] = {bits, k};
            return;
        }
        for (unsigned letter = 0; letter < letters; ++letter)
        {
            auto const ck = key.child(letter);
            std::uint64_t const open = ck.edge_uniform() < params.p ? 1u : 0u;
            self(self, ck, (prefix << d) | letter, depth + 1, bits | (open << depth));
        }
    };
    rec(rec, rng::NodeKey::root(s.seed), 0, 0, 0);
    return states;
}

int shared_prefix(PercolationParams const& params, std::uint64_t i)
{
    params.validate();
    std::uint64_t const leaves = std::uint64_t{1} << (params.d * params.level);
    if (params.d * params.level >= 64 || i < 1 || i >= leaves)
        throw InvalidArgument("leaf index out of range");
    return params.level - ancestor_height(i - 1, i, params.d);
}

TransitionMatrix chain_transition_kernel(PercolationParams const& params,
                                         std::uint64_t i)
{
    int const shared = shared_prefix(params, i);
    int const k = params.level;
    if (k > 12)
        throw BudgetExceeded("transition matrix limited to k <= 12");
    TransitionMatrix t;
    t.length = k;
    std::size_t const n = t.states();
    t.entries.assign(n * n, 0.0);
    std::uint64_t const shared_mask = (std::uint64_t{1} << shared) - 1;
    for (std::uint64_t from = 0; from < n; ++from)
    {
        for (std::uint64_t to = 0; to < n; ++to)
        {
            if ((from & shared_mask) != (to & shared_mask))
                continue;
            double prob = 1;
            for (int j = shared; j < k; ++j)
                prob *= ((to >> j) & 1u) ? params.p : 1 - params.p;
            t.entries[from * n + to] = prob;
        }
    }
    return t;
}

ChainTestResult chain_test(PercolationParams const& params, std::uint64_t i,
                           std::uint64_t trees, std::uint64_t seed)
{
    TransitionMatrix const kernel = chain_transition_kernel(params, i);
    int const d = params.d;
    int const k = params.level;
    std::size_t const n = kernel.states();
    TreeWord const wa = TreeWord::of_leaf_index(d, k, i - 1);
    TreeWord const wb = TreeWord::of_leaf_index(d, k, i);

    auto state_of = [&](rng::NodeKey root, TreeWord const& w) {
        std::uint64_t bits = 0;
        rng::NodeKey key = root;
        for (int j = 0; j < k; ++j)
        {
            key = key.child(w.letter(static_cast<std::size_t>(j)));
            if (key.edge_uniform() < params.p)
                bits |= std::uint64_t{1} << j;
        }
        return bits;
    };

    std::vector<std::uint64_t> counts(n * n, 0);
    for (std::uint64_t t = 0; t < trees; ++t)
    {
        auto const root = rng::NodeKey::root(rng::derive(seed, t));
        ++counts[state_of(root, wa) * n + state_of(root, wb)];
    }

    ChainTestResult r;
    r.index = i;
    r.trees = trees;
    for (std::size_t from = 0; from < n; ++from)
    {
        std::uint64_t row_total = 0;
        for (std::size_t to = 0; to < n; ++to)
            row_total += counts[from * n + to];
        if (row_total == 0)
            continue;
        double pooled_obs = 0;
        double pooled_exp = 0;
        int cells = 0;
        for (std::size_t to = 0; to < n; ++to)
        {
            double const e = static_cast<double>(row_total) * kernel(from, to);
            auto const o = static_cast<double>(counts[from * n + to]);
            if (e == 0)
            {
                if (o > 0)
                    r.statistic = std::numeric_limits<double>::infinity();
                continue;
            }
            if (e < 5)
            {
                pooled_obs += o;
                pooled_exp += e;
                continue;
            }
            r.statistic += (o - e) * (o - e) / e;
            ++cells;
        }
        if (pooled_exp > 0)
        {
            r.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
            ++cells;
        }
        r.dof += cells - 1;
    }
    if (std::isinf(r.statistic))
        r.p_value = 0;
    else
        r.p_value = r.dof > 0 ? stats::chi_square_sf(r.statistic, r.dof) : 1.0;
    return r;
}

//---------------------------------------------------------------------------//
std::string format_sample(PercolationSample const& s)
{
    std::string out;
    out += "p=" + format_double(s.params.p) + "\n";
    out += "k=" + std::to_string(s.params.level) + "\n";
    out += "seed=" + std::to_string(s.seed) + "\n";
    out += format_point_set(s.survivors.dim() == 0 ? PointSet(s.params.d) : s.survivors);
    return out;
}

PercolationSample parse_sample(std::string_view text)
{
    PercolationSample s;
    bool have_p = false;
    bool have_k = false;
    bool have_seed = false;
    std::size_t pos = 0;
    for (;;)
    {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            throw ParseError("sample header ended before the point set");
        auto line = text.substr(pos, nl - pos);
        if (line.substr(0, 2) == "d=")
            break;
        pos = nl + 1;
        if (line.empty() || line.front() == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected key=value in sample header");
        auto key = line.substr(0, eq);
        auto value = std::string(line.substr(eq + 1));
        if (key == "p")
        {
            s.params.p = parse_double(value);
            have_p = true;
        }
        else if (key == "k")
        {
            s.params.level = std::stoi(value);
            have_k = true;
        }
        else if (key == "seed")
        {
            s.seed = std::stoull(value);
            have_seed = true;
        }
        else
        {
            throw ParseError("unknown sample header key '" + std::string(key) + "'");
        }
    }
    if (!have_p || !have_k || !have_seed)
        throw ParseError("sample header needs p, k and seed");
    s.survivors = parse_point_set(text.substr(pos));
    s.params.d = s.survivors.dim();
    s.params.validate();
    return s;
}

}  // namespace fracsum
