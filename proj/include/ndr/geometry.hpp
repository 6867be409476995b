#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace ndr {

using Complex = std::complex<double>;

/// Straight segment between two points of the closed upper half-plane.
/// A segment lying entirely on the real axis is accepted as the positive
/// half-line support used by the KdV kernel.
struct Segment {
    Complex from;
    Complex to;

    double length() const { return std::abs(to - from); }
    Complex point(double t) const { return from + t * (to - from); }
    Complex tangent() const { return (to - from) / length(); }
};

/// Circular arc, parameterized by angle from angle_start to angle_end
/// (counter-clockwise when angle_end > angle_start).
struct CircularArc {
    Complex center;
    double radius = 0.0;
    double angle_start = 0.0;
    double angle_end = 0.0;

    double length() const { return radius * std::abs(angle_end - angle_start); }
    Complex point(double t) const;   // t in [0,1]
    bool closed() const;
};

/// 2D primitive: axis-aligned rectangle or an upper half-disk clipped
/// at Im z >= min_im.
struct Region {
    enum class Shape { Rectangle, HalfDisk };

    Shape shape = Shape::Rectangle;
    Complex center;
    double half_width = 0.0;   // rectangle
    double half_height = 0.0;  // rectangle
    double radius = 0.0;       // half-disk
    double min_im = 0.0;       // half-disk clip height

    bool contains(Complex z) const;
    double diameter() const;
    // bounding box
    double x_min() const;
    double x_max() const;
    double y_min() const;
    double y_max() const;
};

using Primitive = std::variant<Segment, CircularArc, Region>;

/// Geometric description of the spectral support.
struct SupportSpec {
    std::vector<Primitive> primitives;
    std::vector<std::string> labels;

    void add(Primitive p, std::string label = {});

    bool empty() const { return primitives.empty(); }
    bool all_curves() const;
    bool all_regions() const;

    /// Diameter of the support (max pairwise distance of boundary samples).
    double diameter() const;

    /// Arc endpoints and junction points; density blow-up is possible there.
    std::vector<Complex> corner_points() const;

    /// Distance from z to the support.
    double distance(Complex z) const;

    /// Throws std::invalid_argument on an empty spec, any primitive dipping
    /// below the real axis, or a non-transversal contact with the axis.
    void validate() const;
};

/// Discretization of (support, lambda): midpoint nodes with lambda-weights.
struct Quadrature {
    std::vector<Complex> nodes;
    std::vector<double> weights;
    std::vector<int> panel_of;
    std::vector<double> cell_size;
    std::vector<char> endpoint_flags;
    std::vector<double> real_axis_distance;
    bool two_dimensional = false;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

/// Composite midpoint rule on 1D primitives, panels of equal parameter
/// length within each primitive.
Quadrature discretize_contour(const SupportSpec& spec, double nodes_per_unit_length);

/// Uniform square cells clipped by the inside test; a boundary cell is
/// kept iff its center is inside.
Quadrature discretize_region(const SupportSpec& spec, double cell_size);

/// Marks nodes whose cell touches the boundary of the unbounded component
/// of C+ minus the support, via flood fill on a background grid.
std::vector<char> outer_boundary_nodes(const Quadrature& q, const SupportSpec& spec);

}  // namespace ndr
