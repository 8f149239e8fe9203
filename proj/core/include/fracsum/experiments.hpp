#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fracsum/config.hpp"
#include "fracsum/hitting.hpp"

namespace fracsum {

struct ExperimentResult
{
    ExperimentKind experiment = ExperimentKind::main_band;
    std::string csv;
    // Violated assertions, each naming the bound and the grid cell.
    std::vector<std::string> failures;
    // Human-readable summary lines (bands, slopes, soft checks).
    std::vector<std::string> report;
    // Named summary numbers, e.g. "band_lower" or "slope".
    std::map<std::string, double> metrics;
    bool asserted = false;

    bool passed() const noexcept { return failures.empty(); }
    // 0 = passed, 2 = assertion failure.
    int exit_code() const noexcept { return passed() ? 0 : 2; }
};

/*!
 * Exact hit probability of Q_d(2^{-beta}; k) against four target families
 * (singleton, pair at distance 2^{k-2}, sub-cube Delta_{k-3}, discretized
 * segment), its ratio to 2^{-beta k} Cap_beta(A), and a band check per
 * (d, beta).
 */
ExperimentResult run_fp_cap_ratio(ExperimentConfig const& c);

/*!
 * Monte Carlo R(m, n, A) = P((Q + Q') ∩ A ≠ ∅) / (q^n Cap_beta(A)) over
 * m <= n <= n_max, with band checks on R / (2^d p)^m and
 * R / (2^d p)^{m ∨ log2 diam A}, the singleton slope, and exact
 * cross-checks on cells small enough to enumerate.
 */
ExperimentResult run_main_band(ExperimentConfig const& c);

/*!
 * Cap_a(A) / E[Cap_b(A + Q_d(2^{b-a-d}; m))] for a pair A, averaged over
 * sampled percolations; slope in m against a - b and band checks.
 */
ExperimentResult run_cap_compare(ExperimentConfig const& c);

// Paley-Zygmund bounds (uniform and equilibrium measure) against the exact
// or Monte Carlo probability on small fixtures.
ExperimentResult run_pz_diag(ExperimentConfig const& c);

// Two walk ranges in d = 5: ratio to |x|^{-1} Cap_1(A) at radius R and 2R.
ExperimentResult run_srw_band(ExperimentConfig const& c);

ExperimentResult run_experiment(ExperimentConfig const& c);

// Small sum-hit fixtures from a pz_diag-style config (pq x levels x targets).
std::vector<SumHitSpec> tiny_fixtures(ExperimentConfig const& c);

// Target of a named family for the main band grid.
PointSet main_band_family(std::string const& name, int d);

struct VerifyOutcome
{
    std::vector<std::string> matched;
    std::vector<std::string> mismatched;
    bool passed() const noexcept { return mismatched.empty() && !matched.empty(); }
};

/*!
 * For every <name>.cfg in `dir` with a sibling <name>.csv, reruns the
 * experiment and compares the CSV bytes.
 */
VerifyOutcome verify_golden(std::filesystem::path const& dir, unsigned workers = 1);

}  // namespace fracsum
