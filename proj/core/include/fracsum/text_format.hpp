#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracsum/lattice.hpp"

namespace fracsum {

/*
 * Point-set text format:
 *
 *     # comment
 *     d=2
 *     0 0
 *     3 4
 *
 * One point per line, space separated; '#' starts a comment anywhere on a
 * line. The weighted variant carries one extra real column per point.
 */

std::string format_point_set(PointSet const& set);
PointSet parse_point_set(std::string_view text);

PointSet read_point_set_file(std::filesystem::path const& path);
void write_point_set_file(std::filesystem::path const& path, PointSet const& set);

struct WeightedPoints
{
    PointSet support;
    std::vector<double> weights;  // aligned with support order
};

std::string format_weighted_points(PointSet const& support,
                                   std::span<double const> weights);
WeightedPoints parse_weighted_points(std::string_view text);

// Shortest representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string read_text_file(std::filesystem::path const& path);
void write_text_file(std::filesystem::path const& path, std::string_view text);

}  // namespace fracsum
