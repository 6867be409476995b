#include "ndr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ndr {

namespace {

constexpr double kGeomTol = 1e-12;

double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

double segment_distance(const Segment& s, Complex z) {
    const Complex d = s.to - s.from;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(z - s.from);
    const double t = clamp01(((z - s.from).real() * d.real() + (z - s.from).imag() * d.imag()) / len2);
    return std::abs(z - s.point(t));
}

double arc_distance(const CircularArc& a, Complex z) {
    const Complex rel = z - a.center;
    const double r = std::abs(rel);
    if (a.closed()) return std::abs(r - a.radius);
    double ang = std::arg(rel);
    const double lo = std::min(a.angle_start, a.angle_end);
    const double hi = std::max(a.angle_start, a.angle_end);
    // bring ang into [lo, lo + 2pi)
    const double two_pi = 2.0 * M_PI;
    while (ang < lo) ang += two_pi;
    while (ang >= lo + two_pi) ang -= two_pi;
    if (ang <= hi) return std::abs(r - a.radius);
    const double d1 = std::abs(z - a.point(0.0));
    const double d2 = std::abs(z - a.point(1.0));
    return std::min(d1, d2);
}

double region_boundary_or_inside_distance(const Region& r, Complex z) {
    if (r.contains(z)) return 0.0;
    if (r.shape == Region::Shape::Rectangle) {
        const double dx = std::max({r.x_min() - z.real(), 0.0, z.real() - r.x_max()});
        const double dy = std::max({r.y_min() - z.imag(), 0.0, z.imag() - r.y_max()});
        return std::hypot(dx, dy);
    }
    // half-disk
    const double rho = std::abs(z - r.center);
    if (z.imag() >= r.min_im) return std::max(rho - r.radius, 0.0);
    // below the clip line: distance to the clipped chord or to the circle
    const double half_chord = (r.radius > r.min_im)
        ? std::sqrt(std::max(r.radius * r.radius - r.min_im * r.min_im, 0.0)) : 0.0;
    const double dx = std::max(std::abs(z.real() - r.center.real()) - half_chord, 0.0);
    return std::hypot(dx, r.min_im - z.imag());
}

void sample_primitive(const Primitive& p, int m, std::vector<Complex>& out) {
    if (const auto* s = std::get_if<Segment>(&p)) {
        for (int k = 0; k <= m; ++k) out.push_back(s->point(double(k) / m));
    } else if (const auto* a = std::get_if<CircularArc>(&p)) {
        for (int k = 0; k <= m; ++k) out.push_back(a->point(double(k) / m));
    } else {
        const auto& r = std::get<Region>(p);
        if (r.shape == Region::Shape::Rectangle) {
            out.push_back({r.x_min(), r.y_min()});
            out.push_back({r.x_max(), r.y_min()});
            out.push_back({r.x_min(), r.y_max()});
            out.push_back({r.x_max(), r.y_max()});
        } else {
            for (int k = 0; k <= m; ++k) {
                const double th = M_PI * double(k) / m;
                out.push_back(r.center + r.radius * Complex(std::cos(th), std::sin(th)));
            }
            out.push_back({r.center.real() - r.radius, r.min_im});
            out.push_back({r.center.real() + r.radius, r.min_im});
        }
    }
}

}  // namespace

Complex CircularArc::point(double t) const {
    const double th = angle_start + t * (angle_end - angle_start);
    return center + radius * Complex(std::cos(th), std::sin(th));
}

bool CircularArc::closed() const {
    return std::abs(std::abs(angle_end - angle_start) - 2.0 * M_PI) < kGeomTol;
}

bool Region::contains(Complex z) const {
    if (shape == Shape::Rectangle) {
        return z.real() >= x_min() - kGeomTol && z.real() <= x_max() + kGeomTol &&
               z.imag() >= y_min() - kGeomTol && z.imag() <= y_max() + kGeomTol;
    }
    return std::abs(z - center) <= radius + kGeomTol && z.imag() >= min_im - kGeomTol;
}

double Region::diameter() const {
    if (shape == Shape::Rectangle) return 2.0 * std::hypot(half_width, half_height);
    return 2.0 * radius;
}

double Region::x_min() const {
    return shape == Shape::Rectangle ? center.real() - half_width : center.real() - radius;
}
double Region::x_max() const {
    return shape == Shape::Rectangle ? center.real() + half_width : center.real() + radius;
}
double Region::y_min() const {
    return shape == Shape::Rectangle ? center.imag() - half_height : min_im;
}
double Region::y_max() const {
    return shape == Shape::Rectangle ? center.imag() + half_height : center.imag() + radius;
}

void SupportSpec::add(Primitive p, std::string label) {
    primitives.push_back(std::move(p));
    labels.push_back(std::move(label));
}

bool SupportSpec::all_curves() const {
    return std::all_of(primitives.begin(), primitives.end(),
                       [](const Primitive& p) { return !std::holds_alternative<Region>(p); });
}

bool SupportSpec::all_regions() const {
    return std::all_of(primitives.begin(), primitives.end(),
                       [](const Primitive& p) { return std::holds_alternative<Region>(p); });
}

double SupportSpec::diameter() const {
    std::vector<Complex> pts;
    for (const auto& p : primitives) sample_primitive(p, 32, pts);
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, std::abs(pts[i] - pts[j]));
    return d;
}

std::vector<Complex> SupportSpec::corner_points() const {
    std::vector<Complex> pts;
    for (const auto& p : primitives) {
        if (const auto* s = std::get_if<Segment>(&p)) {
            pts.push_back(s->from);
            pts.push_back(s->to);
        } else if (const auto* a = std::get_if<CircularArc>(&p)) {
            if (!a->closed()) {
                pts.push_back(a->point(0.0));
                pts.push_back(a->point(1.0));
            }
        }
    }
    return pts;
}

double SupportSpec::distance(Complex z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : primitives) {
        if (const auto* s = std::get_if<Segment>(&p)) d = std::min(d, segment_distance(*s, z));
        else if (const auto* a = std::get_if<CircularArc>(&p)) d = std::min(d, arc_distance(*a, z));
        else d = std::min(d, region_boundary_or_inside_distance(std::get<Region>(p), z));
    }
    return d;
}

void SupportSpec::validate() const {
    if (primitives.empty()) throw std::invalid_argument("empty support");
    for (const auto& p : primitives) {
        if (const auto* s = std::get_if<Segment>(&p)) {
            if (s->from.imag() < -kGeomTol || s->to.imag() < -kGeomTol)
                throw std::invalid_argument("not in closed upper half-plane");
            if (s->length() <= 0.0) throw std::invalid_argument("degenerate segment");
            const bool on_axis = s->from.imag() < kGeomTol && s->to.imag() < kGeomTol;
            if (on_axis) {
                // real-line segment: KdV half-line support
                if (s->from.real() < -kGeomTol || s->to.real() < -kGeomTol)
                    throw std::invalid_argument("real-line support must lie on the positive half-line");
            } else if (s->from.imag() < kGeomTol || s->to.imag() < kGeomTol) {
                const Complex t = s->tangent();
                if (std::abs(t.imag()) < 1e-9)
                    throw std::invalid_argument("tangential contact with the real axis");
            }
        } else if (const auto* a = std::get_if<CircularArc>(&p)) {
            if (a->radius <= 0.0) throw std::invalid_argument("degenerate arc");
            const int m = 256;
            for (int k = 0; k <= m; ++k)
                if (a->point(double(k) / m).imag() < -1e-9 * a->radius)
                    throw std::invalid_argument("not in closed upper half-plane");
            for (double t : {0.0, 1.0}) {
                if (a->closed()) break;
                const Complex z = a->point(t);
                if (z.imag() < kGeomTol) {
                    const double th = a->angle_start + t * (a->angle_end - a->angle_start);
                    const Complex tangent = Complex(-std::sin(th), std::cos(th));
                    if (std::abs(tangent.imag()) < 1e-9)
                        throw std::invalid_argument("tangential contact with the real axis");
                }
            }
        } else {
            const auto& r = std::get<Region>(p);
            if (r.y_min() < -kGeomTol) throw std::invalid_argument("not in closed upper half-plane");
            if (r.diameter() <= 0.0) throw std::invalid_argument("degenerate region");
        }
    }
}

double Quadrature::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

Quadrature discretize_contour(const SupportSpec& spec, double nodes_per_unit_length) {
    spec.validate();
    if (!spec.all_curves())
        throw std::invalid_argument("contour discretization requires 1D primitives");
    if (nodes_per_unit_length <= 0.0)
        throw std::invalid_argument("nodes_per_unit_length must be positive");

    Quadrature q;
    for (std::size_t ip = 0; ip < spec.primitives.size(); ++ip) {
        const auto& p = spec.primitives[ip];
        double len = 0.0;
        bool closed = false;
        if (const auto* s = std::get_if<Segment>(&p)) len = s->length();
        else {
            const auto& a = std::get<CircularArc>(p);
            len = a.length();
            closed = a.closed();
        }
        const int m = std::max(1, int(std::lround(len * nodes_per_unit_length)));
        const double h = len / m;
        for (int k = 0; k < m; ++k) {
            const double t = (k + 0.5) / m;
            Complex z;
            if (const auto* s = std::get_if<Segment>(&p)) z = s->point(t);
            else z = std::get<CircularArc>(p).point(t);
            q.nodes.push_back(z);
            q.weights.push_back(h);
            q.panel_of.push_back(int(ip));
            q.cell_size.push_back(h);
            q.endpoint_flags.push_back(!closed && (k == 0 || k == m - 1));
            q.real_axis_distance.push_back(z.imag());
        }
    }
    return q;
}

Quadrature discretize_region(const SupportSpec& spec, double cell_size) {
    spec.validate();
    if (!spec.all_regions())
        throw std::invalid_argument("region discretization requires 2D primitives");
    if (cell_size <= 0.0) throw std::invalid_argument("cell_size must be positive");

    Quadrature q;
    q.two_dimensional = true;
    for (std::size_t ip = 0; ip < spec.primitives.size(); ++ip) {
        const auto& r = std::get<Region>(spec.primitives[ip]);
        if (cell_size >= r.diameter()) throw std::invalid_argument("cell too coarse");
        const int nx = std::max(1, int(std::lround((r.x_max() - r.x_min()) / cell_size)));
        const int ny = std::max(1, int(std::lround((r.y_max() - r.y_min()) / cell_size)));
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const Complex z(r.x_min() + (i + 0.5) * cell_size,
                                r.y_min() + (j + 0.5) * cell_size);
                if (!r.contains(z)) continue;
                q.nodes.push_back(z);
                q.weights.push_back(cell_size * cell_size);
                q.panel_of.push_back(int(ip));
                q.cell_size.push_back(cell_size);
                q.endpoint_flags.push_back(false);
                q.real_axis_distance.push_back(z.imag());
            }
        }
    }
    return q;
}

std::vector<char> outer_boundary_nodes(const Quadrature& q, const SupportSpec& spec) {
    const double diam = spec.diameter();
    double min_cell = std::numeric_limits<double>::infinity();
    for (double c : q.cell_size) min_cell = std::min(min_cell, c);
    double hg = std::min(diam / 256.0, 0.5 * min_cell);

    // bounding box of the support, inflated
    double x0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const Complex& z : q.nodes) {
        x0 = std::min(x0, z.real());
        x1 = std::max(x1, z.real());
        y1 = std::max(y1, z.imag());
    }
    const double pad = 0.25 * diam + 4 * hg;
    x0 -= pad; x1 += pad; y1 += pad;
    const double y0 = 0.0;  // the grid stays in the open upper half-plane

    std::size_t nx = std::size_t((x1 - x0) / hg) + 1;
    std::size_t ny = std::size_t((y1 - y0) / hg) + 1;
    while (nx * ny > 2'000'000) {  // cap the background grid
        hg *= 1.5;
        nx = std::size_t((x1 - x0) / hg) + 1;
        ny = std::size_t((y1 - y0) / hg) + 1;
    }

    const double block_radius = 0.75 * std::sqrt(2.0) * hg;
    auto cell_center = [&](std::size_t i, std::size_t j) {
        return Complex(x0 + (i + 0.5) * hg, y0 + (j + 0.5) * hg);
    };
    // 0 = open, 1 = blocked, 2 = flooded
    std::vector<unsigned char> state(nx * ny, 0);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            if (spec.distance(cell_center(i, j)) <= block_radius) state[j * nx + i] = 1;

    std::deque<std::pair<std::size_t, std::size_t>> frontier;
    auto seed = [&](std::size_t i, std::size_t j) {
        if (state[j * nx + i] == 0) {
            state[j * nx + i] = 2;
            frontier.emplace_back(i, j);
        }
    };
    for (std::size_t i = 0; i < nx; ++i) {
        seed(i, ny - 1);
    }
    for (std::size_t j = 0; j < ny; ++j) {
        seed(0, j);
        seed(nx - 1, j);
    }
    while (!frontier.empty()) {
        auto [i, j] = frontier.front();
        frontier.pop_front();
        if (i > 0) seed(i - 1, j);
        if (i + 1 < nx) seed(i + 1, j);
        if (j > 0) seed(i, j - 1);
        if (j + 1 < ny) seed(i, j + 1);
    }

    std::vector<char> marked(q.size(), 0);
    for (std::size_t k = 0; k < q.size(); ++k) {
        const Complex z = q.nodes[k];
        const double reach = q.cell_size[k] + std::sqrt(2.0) * hg;
        const int ic = int((z.real() - x0) / hg);
        const int jc = int((z.imag() - y0) / hg);
        const int span = int(reach / hg) + 1;
        for (int j = std::max(0, jc - span); j <= std::min(int(ny) - 1, jc + span) && !marked[k]; ++j)
            for (int i = std::max(0, ic - span); i <= std::min(int(nx) - 1, ic + span); ++i)
                if (state[std::size_t(j) * nx + i] == 2 &&
                    std::abs(cell_center(i, j) - z) <= reach) {
                    marked[k] = 1;
                    break;
                }
    }
    return marked;
}

}  // namespace ndr
