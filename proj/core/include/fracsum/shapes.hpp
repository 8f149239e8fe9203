#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fracsum/lattice.hpp"

namespace fracsum {

// Closed Euclidean ball.
struct Ball
{
    std::vector<double> center;
    double radius = 0;
};

// Closed segment from `from` to `to`.
struct Segment
{
    std::vector<double> from;
    std::vector<double> to;
};

// Closed axis-aligned box [lo, hi].
struct AxisBox
{
    std::vector<double> lo;
    std::vector<double> hi;
};

// Middle-thirds Cantor set on [-1/2, 1/2] (d = 1) after `depth` removals.
struct CantorSet
{
    int depth = 0;
};

struct ShapeSpec;

struct ShapeUnion
{
    std::vector<ShapeSpec> parts;
};

//---------------------------------------------------------------------------//
/*!
 * A compact subset of [-1/2, 1/2]^d from a closed family of shapes, each
 * with an exact test against axis-aligned cubes.
 */
struct ShapeSpec
{
    int dim = 1;
    std::variant<Ball, Segment, AxisBox, CantorSet, ShapeUnion> shape;

    static ShapeSpec point(std::vector<double> at);
    static ShapeSpec ball(std::vector<double> center, double radius);
    static ShapeSpec segment(std::vector<double> from, std::vector<double> to);
    static ShapeSpec box(std::vector<double> lo, std::vector<double> hi);
    static ShapeSpec cantor(int depth);
    static ShapeSpec union_of(std::vector<ShapeSpec> parts);
};

// Throws InvalidArgument unless the shape is well formed and inside
// [-1/2, 1/2]^d.
void validate(ShapeSpec const& shape);

// Does the closed cube prod_i [lo_i, hi_i] meet the shape?
bool meets_cube(ShapeSpec const& shape, std::span<double const> lo,
                std::span<double const> hi);

/*!
 * Centers of the level-k cells: integer c with (c + [-2, 2]^d) meeting
 * 2^k * shape, i.e. the x = 2^{-k} c selected by the union defining T_k.
 */
PointSet discretize_cells(ShapeSpec const& shape, int k);

/*!
 * The lattice set 2^k T_k(shape) ∩ Z^d: every integer point within
 * l-infinity distance 2 of a level-k cell center.
 */
PointSet discretize_shape(ShapeSpec const& shape, int k);

// Text form, e.g. "segment:-0.125,0;0.125,0", "ball:0,0;0.25",
// "box:-0.5;0.5", "cantor:3", "union:(...)|(...)".
ShapeSpec parse_shape(std::string_view text);
std::string format_shape(ShapeSpec const& shape);

}  // namespace fracsum
