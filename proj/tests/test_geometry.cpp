#include "doctest.h"

#include <cmath>
#include <complex>

#include "ndr/geometry.hpp"

using ndr::CircularArc;
using ndr::Complex;
using ndr::Quadrature;
using ndr::Region;
using ndr::Segment;
using ndr::SupportSpec;

namespace {

SupportSpec vertical_segment(double y0 = 0.1, double y1 = 1.0) {
    SupportSpec spec;
    spec.add(Segment{Complex(0.0, y0), Complex(0.0, y1)});
    return spec;
}

SupportSpec upper_semicircle(double rho = 1.0) {
    SupportSpec spec;
    CircularArc arc;
    arc.center = Complex(0.0, 0.0);
    arc.radius = rho;
    arc.angle_start = 0.0;
    arc.angle_end = std::acos(-1.0);
    spec.add(arc);
    return spec;
}

}  // namespace

TEST_CASE("segment discretization: midpoint nodes, weights sum to length") {
    const SupportSpec spec = vertical_segment(0.1, 1.0);
    const Quadrature q = ndr::discretize_contour(spec, 100.0);
    CHECK(q.size() == 90);
    CHECK(q.total_weight() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK_FALSE(q.two_dimensional);
    // nodes strictly inside, panel midpoints
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(q.nodes[i].imag() > 0.1);
        CHECK(q.nodes[i].imag() < 1.0);
        CHECK(q.real_axis_distance[i] == doctest::Approx(q.nodes[i].imag()));
    }
    // endpoint flags only on the first and last node of the open segment
    CHECK(q.endpoint_flags.front() == 1);
    CHECK(q.endpoint_flags.back() == 1);
    for (std::size_t i = 1; i + 1 < q.size(); ++i) CHECK(q.endpoint_flags[i] == 0);
}

TEST_CASE("arc discretization preserves total length and radius") {
    const SupportSpec spec = upper_semicircle();
    const Quadrature q = ndr::discretize_contour(spec, 200.0 / std::acos(-1.0));
    CHECK(q.total_weight() == doctest::Approx(std::acos(-1.0)).epsilon(1e-12));
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(std::abs(q.nodes[i]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validation rejects bad supports") {
    SupportSpec empty;
    CHECK_THROWS_WITH_AS(empty.validate(), "empty support", std::invalid_argument);

    SupportSpec below;
    below.add(Segment{Complex(0.0, -0.5), Complex(0.0, 1.0)});
    CHECK_THROWS_AS(below.validate(), std::invalid_argument);

    // segments exactly on the real axis are the KdV carve-out: allowed on
    // the positive half-line only
    SupportSpec kdv;
    kdv.add(Segment{Complex(0.1, 0.0), Complex(1.0, 0.0)});
    CHECK_NOTHROW(kdv.validate());

    SupportSpec negative;
    negative.add(Segment{Complex(-0.5, 0.0), Complex(1.0, 0.0)});
    CHECK_THROWS_WITH_AS(negative.validate(),
                         "real-line support must lie on the positive half-line",
                         std::invalid_argument);
}

TEST_CASE("region discretization: cell areas sum close to the region area") {
    SupportSpec spec;
    Region r;
    r.shape = Region::Shape::Rectangle;
    r.center = Complex(0.0, 1.0);
    r.half_width = 0.5;
    r.half_height = 0.25;
    spec.add(r);
    const Quadrature q = ndr::discretize_region(spec, 0.05);
    CHECK(q.two_dimensional);
    CHECK(q.total_weight() == doctest::Approx(0.5).epsilon(0.05));
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(r.contains(q.nodes[i]));

    CHECK_THROWS_WITH_AS(ndr::discretize_region(spec, 5.0), "cell too coarse",
                         std::invalid_argument);
    CHECK_THROWS_AS(ndr::discretize_contour(spec, 10.0), std::invalid_argument);
}

TEST_CASE("half-disk region respects the clip height") {
    SupportSpec spec;
    Region r;
    r.shape = Region::Shape::HalfDisk;
    r.center = Complex(0.0, 0.0);
    r.radius = 1.0;
    r.min_im = 0.1;
    spec.add(r);
    const Quadrature q = ndr::discretize_region(spec, 0.04);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(q.nodes[i].imag() >= 0.1);
        CHECK(std::abs(q.nodes[i]) <= 1.0);
    }
}

TEST_CASE("corner points: segment endpoints and arc ends") {
    SupportSpec spec = vertical_segment(0.1, 1.0);
    const auto corners = spec.corner_points();
    REQUIRE(corners.size() == 2);
    CHECK(std::abs(corners[0] - Complex(0.0, 0.1)) < 1e-14);
    CHECK(std::abs(corners[1] - Complex(0.0, 1.0)) < 1e-14);
}

TEST_CASE("support distance") {
    const SupportSpec spec = vertical_segment(0.0, 1.0);
    CHECK(spec.distance(Complex(0.3, 0.5)) == doctest::Approx(0.3));
    CHECK(spec.distance(Complex(0.0, 1.4)) == doctest::Approx(0.4));
    CHECK(spec.diameter() == doctest::Approx(1.0));
}

TEST_CASE("outer boundary nodes of a rectangle are its rim cells") {
    SupportSpec spec;
    Region r;
    r.shape = Region::Shape::Rectangle;
    r.center = Complex(0.0, 1.0);
    r.half_width = 0.4;
    r.half_height = 0.4;
    spec.add(r);
    const Quadrature q = ndr::discretize_region(spec, 0.05);
    const auto outer = ndr::outer_boundary_nodes(q, spec);
    REQUIRE(outer.size() == q.size());
    std::size_t n_outer = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Complex z = q.nodes[i];
        const double edge_dist =
            std::min(std::min(std::abs(z.real() - -0.4), std::abs(0.4 - z.real())),
                     std::min(std::abs(z.imag() - 0.6), std::abs(1.4 - z.imag())));
        if (outer[i]) {
            ++n_outer;
            CHECK(edge_dist < 3.0 * 0.05);
        } else {
            CHECK(edge_dist > 0.04);
        }
    }
    CHECK(n_outer > 4);  // the rim is nonempty and goes around
}
