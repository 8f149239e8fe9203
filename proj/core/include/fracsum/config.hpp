#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fracsum/lattice.hpp"

namespace fracsum {

enum class ExperimentKind
{
    fp_cap_ratio,
    main_band,
    cap_compare,
    pz_diag,
    srw_band,
};

char const* to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);
std::vector<ExperimentKind> all_experiments();

/*!
 * Experiment configuration in a key=value text format:
 *
 *     # comment
 *     version=1
 *     experiment=main_band
 *     seed=20240601
 *     m=1..4
 *     families=singleton,pair,cube
 *
 * Common keys live in fields; grid keys stay as strings in `params` and are
 * read through the typed getters. Integer lists accept "a..b" ranges.
 */
struct ExperimentConfig
{
    static constexpr int kVersion = 1;

    ExperimentKind experiment = ExperimentKind::main_band;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    // Empty = standard output.
    std::filesystem::path output;
    // Explore mode runs without preconditions or assertions.
    bool explore = false;
    double band_limit = 50;
    // Worker threads; never affects the output.
    unsigned workers = 1;
    std::map<std::string, std::string> params;

    // Full default grid for an experiment.
    static ExperimentConfig defaults(ExperimentKind kind);

    // Sets a common field or a grid key. Unknown grid keys are rejected.
    void set(std::string const& key, std::string const& value);

    std::string const& get(std::string const& key) const;
    int get_int(std::string const& key) const;
    double get_double(std::string const& key) const;
    bool get_bool(std::string const& key) const;
    std::vector<int> get_ints(std::string const& key) const;
    std::vector<double> get_doubles(std::string const& key) const;
    std::vector<std::string> get_list(std::string const& key) const;
};

std::string format_config(ExperimentConfig const& c);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig read_config_file(std::filesystem::path const& path);

// "1..4" or "1,3,5".
std::vector<int> parse_int_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view s);
bool parse_bool(std::string_view s);
std::uint64_t parse_uint(std::string_view s);
std::int64_t parse_int(std::string_view s);

// Point "x,y,..." and point list "x,y;x,y;..." in dimension d.
LatticePoint parse_point(std::string_view text, int d);
PointSet parse_point_list(std::string_view text, int d);
std::string format_point_list(PointSet const& s);

}  // namespace fracsum
