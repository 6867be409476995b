#include "ndr/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace ndr {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Double-exponential rule with the abscissa reported together with its
// distance to the nearest endpoint, so integrands can evaluate singular
// factors without cancellation (the distance underflows long before the
// abscissa stops rounding to the endpoint itself).
double tanh_sinh_core(const std::function<double(double, double)>& f, double a,
                      double b, double tol) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        throw std::invalid_argument("tanh_sinh: reversed interval");
    }
    const double hw = 0.5 * (b - a);
    const double tmax = 4.0;

    auto sample = [&](double t) -> double {
        const double s = 0.5 * kPi * std::sinh(t);
        const double ch = std::cosh(s);
        const double w = hw * 0.5 * kPi * std::cosh(t) / (ch * ch);
        double x, d;
        if (t >= 0.0) {
            d = 2.0 * hw / (std::exp(2.0 * s) + 1.0);
            x = b - d;
        } else {
            d = 2.0 * hw / (std::exp(-2.0 * s) + 1.0);
            x = a + d;
        }
        if (d <= 0.0) return 0.0;
        const double fx = f(x, d);
        if (!std::isfinite(fx)) return 0.0;
        return w * fx;
    };

    double h = 0.5;
    double sum = 0.0;
    for (double t = -tmax; t <= tmax + 1e-12; t += h) sum += sample(t);
    double integral = sum * h;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = -tmax + h; t < tmax; t += 2.0 * h) add += sample(t);
        const double next = 0.5 * integral + add * h;
        const double diff = std::abs(next - integral);
        integral = next;
        if (level >= 3 && diff <= std::max(tol, tol * std::abs(next))) break;
    }
    return integral;
}

// sqrt(|Q|) at y, with the linear factor of the band endpoint `e_near`
// replaced by the exact distance d (pass e_near < 0 for plain evaluation).
// The replacement avoids cancellation when y sits at an underflowed
// tanh-sinh distance from a singular endpoint.
double sqrt_abs_q(const BandSystem& sys, double e_near, double y, double d) {
    double prod = 1.0;
    for (double e : sys.endpoints) {
        if (e == e_near)
            prod *= d * (e + y);  // |e^2 - y^2| = |e - y| (e + y)
        else
            prod *= std::abs((e - y) * (e + y));
    }
    return std::sqrt(prod);
}

}  // namespace

double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    return tanh_sinh_core([&](double x, double) { return f(x); }, a, b, tol);
}

CondensateValues semicircle_condensate(double rho, Complex z) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    if (std::abs(std::abs(z) - rho) > 1e-10)
        throw std::invalid_argument("z off the circle");
    if (z.imag() < -1e-10) throw std::invalid_argument("z below the real axis");
    CondensateValues out;
    out.u = std::max(z.imag(), 0.0) / (kPi * rho);
    out.v = -4.0 * std::imag(z * z) / (kPi * rho);
    return out;
}

double box_condensate(double q, Complex z) {
    if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
    const double tol = 1e-10 * std::max(1.0, q);
    if (std::abs(z.real()) > tol || z.imag() < -tol)
        throw std::invalid_argument("z off the segment");
    const double y = std::max(z.imag(), 0.0);
    if (y >= q) throw std::invalid_argument("endpoint singularity");
    return y / (kPi * std::sqrt((q - y) * (q + y)));
}

BandSystem BandSystem::odd(std::vector<double> endpoints) {
    BandSystem s;
    s.kind = Kind::OddBands;
    s.endpoints = std::move(endpoints);
    s.validate();
    return s;
}

BandSystem BandSystem::even(std::vector<double> endpoints) {
    BandSystem s;
    s.kind = Kind::EvenBands;
    s.endpoints = std::move(endpoints);
    s.validate();
    return s;
}

void BandSystem::validate() const {
    const std::size_t m = endpoints.size();
    if (kind == Kind::OddBands) {
        if (m == 0 || m % 2 == 0)
            throw std::invalid_argument("odd band system needs 2N+1 endpoints");
    } else {
        if (m < 2 || m % 2 != 0)
            throw std::invalid_argument("even band system needs 2N endpoints, N >= 1");
    }
    double prev = 0.0;
    for (double e : endpoints) {
        if (!(e > prev))
            throw std::invalid_argument("band endpoints must be strictly increasing and positive");
        prev = e;
    }
}

int BandSystem::gap_count() const {
    return kind == Kind::OddBands ? static_cast<int>(endpoints.size() / 2)
                                  : static_cast<int>(endpoints.size() / 2);
}

int BandSystem::band_count() const {
    return kind == Kind::OddBands ? static_cast<int>(endpoints.size() / 2) + 1
                                  : static_cast<int>(endpoints.size() / 2);
}

void BandSystem::band(int j, double& lo, double& hi) const {
    if (j < 0 || j >= band_count()) throw std::out_of_range("band index");
    if (kind == Kind::OddBands) {
        if (j == 0) {
            lo = 0.0;
            hi = endpoints[0];
        } else {
            lo = endpoints[static_cast<std::size_t>(2 * j - 1)];
            hi = endpoints[static_cast<std::size_t>(2 * j)];
        }
    } else {
        lo = endpoints[static_cast<std::size_t>(2 * j)];
        hi = endpoints[static_cast<std::size_t>(2 * j + 1)];
    }
}

void BandSystem::gap(int j, double& lo, double& hi) const {
    if (j < 0 || j >= gap_count()) throw std::out_of_range("gap index");
    if (kind == Kind::OddBands) {
        lo = endpoints[static_cast<std::size_t>(2 * j)];
        hi = endpoints[static_cast<std::size_t>(2 * j + 1)];
    } else if (j == 0) {
        lo = 0.0;  // central half-gap, reduced by symmetry
        hi = endpoints[0];
    } else {
        lo = endpoints[static_cast<std::size_t>(2 * j - 1)];
        hi = endpoints[static_cast<std::size_t>(2 * j)];
    }
}

double BandSystem::q_at(double y) const {
    double prod = 1.0;
    for (double e : endpoints) prod *= (e - y) * (e + y);
    return prod;
}

double BandPolynomial::g_at(double y) const {
    const int n = static_cast<int>(coefficients.size());
    const double y2 = y * y;
    if (bands.kind == BandSystem::Kind::OddBands) {
        // g(y) = -i P(iy) = (-1)^N y^{2N+1} + sum_k c_k (-1)^{k-1} y^{2k-1}
        double acc = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^N
        // Horner in y^2 from the leading term down to c_1.
        for (int k = n; k >= 1; --k) {
            const double sign = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^{k-1}
            acc = acc * y2 + sign * coefficients[static_cast<std::size_t>(k - 1)];
        }
        return acc * y;
    }
    // g(y) = P(iy) = (-1)^N y^{2N} + sum_k c_k (-1)^k y^{2k}
    double acc = (n % 2 == 0) ? 1.0 : -1.0;
    for (int k = n - 1; k >= 0; --k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        acc = acc * y2 + sign * coefficients[static_cast<std::size_t>(k)];
    }
    return acc;
}

double gap_integral(const BandPolynomial& p, int j) {
    double lo, hi;
    p.bands.gap(j, lo, hi);
    return tanh_sinh_core(
        [&](double y, double d) {
            const double near = (y - lo < hi - y) ? lo : hi;
            return p.g_at(y) / sqrt_abs_q(p.bands, near > 0.0 ? near : -1.0, y, d);
        },
        lo, hi, 1e-12);
}

namespace {

// int_gap y^m / sqrt(|Q|) dy for the monomial moments of the gap system.
double gap_moment(const BandSystem& sys, int j, int m) {
    double lo, hi;
    sys.gap(j, lo, hi);
    return tanh_sinh_core(
        [&](double y, double d) {
            const double near = (y - lo < hi - y) ? lo : hi;
            return std::pow(y, m) / sqrt_abs_q(sys, near > 0.0 ? near : -1.0, y, d);
        },
        lo, hi, 1e-12);
}

double bisect_zero(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw std::runtime_error("branch/sign inconsistency");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || hi - lo < 1e-14 * std::max(1.0, std::abs(hi)))
            return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BandPolynomial solve_band_polynomial(const BandSystem& bands) {
    bands.validate();
    BandPolynomial p;
    p.bands = bands;
    const int navail = bands.gap_count();
    const bool odd = bands.kind == BandSystem::Kind::OddBands;
    const int n = navail;  // unknown coefficients

    if (n > 0) {
        Eigen::MatrixXd mat(n, n);
        Eigen::VectorXd rhs(n);
        const double lead_sign = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^N
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                if (odd) {
                    const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^{(k+1)-1}
                    mat(j, k) = sign * gap_moment(bands, j, 2 * k + 1);
                } else {
                    const double sign = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^k
                    mat(j, k) = sign * gap_moment(bands, j, 2 * k);
                }
            }
            const int lead = odd ? 2 * n + 1 : 2 * n;
            rhs(j) = -lead_sign * gap_moment(bands, j, lead);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
        if (!lu.isInvertible())
            throw std::runtime_error("singular gap system");
        Eigen::VectorXd c = lu.solve(rhs);
        p.coefficients.assign(c.data(), c.data() + n);
    }

    // One verified zero of g per gap (sign change + uniqueness by sampling).
    auto g = [&](double y) { return p.g_at(y); };
    for (int j = 0; j < n; ++j) {
        double lo, hi;
        bands.gap(j, lo, hi);
        const double left = lo + (hi - lo) * 1e-9;
        const double right = hi - (hi - lo) * 1e-9;
        int changes = 0;
        const int samples = 400;
        double prev = g(left);
        for (int s = 1; s <= samples; ++s) {
            const double y = left + (right - left) * s / samples;
            const double val = g(y);
            if (prev * val < 0.0) ++changes;
            if (val != 0.0) prev = val;
        }
        if (changes != 1) throw std::runtime_error("branch/sign inconsistency");
        p.gap_zeros.push_back(bisect_zero(g, left, right));
    }

    // Fix the per-band sign by positivity at the midpoint, then verify the
    // sign is constant across the band interior.
    for (int b = 0; b < bands.band_count(); ++b) {
        double lo, hi;
        bands.band(b, lo, hi);
        const double mid = 0.5 * (lo + hi);
        const double s = g(mid) > 0.0 ? 1.0 : -1.0;
        const double inset = odd && b == 0 ? 1e-6 * hi : 1e-6 * (hi - lo);
        for (int k = 0; k <= 100; ++k) {
            const double y = (lo + inset) + (hi - lo - 2.0 * inset) * k / 100.0;
            if (s * g(y) <= 0.0)
                throw std::runtime_error("branch/sign inconsistency");
        }
        p.band_signs.push_back(s);
    }
    return p;
}

double bound_state_density(const BandPolynomial& p, Complex z) {
    const double scale = p.bands.endpoints.back();
    if (std::abs(z.real()) > 1e-10 * scale)
        throw std::invalid_argument("z not on a band");
    const double y = z.imag();
    if (y < -1e-12 * scale) throw std::invalid_argument("z not on a band");
    const double etol = 1e-12 * scale;
    for (int b = 0; b < p.bands.band_count(); ++b) {
        double lo, hi;
        p.bands.band(b, lo, hi);
        if (std::abs(y - hi) <= etol || (lo > 0.0 && std::abs(y - lo) <= etol))
            throw std::invalid_argument("band endpoint");
        if (y > lo && y < hi) {
            const double q = p.bands.q_at(y);
            return p.band_signs[static_cast<std::size_t>(b)] * p.g_at(y) /
                   (kPi * std::sqrt(std::abs(q)));
        }
        if (lo == 0.0 && std::abs(y) <= etol) return 0.0;  // P odd at z = 0
    }
    throw std::invalid_argument("z not on a band");
}

double bound_state_green_potential(const BandPolynomial& p, Complex z) {
    const double scale = p.bands.endpoints.back();
    const bool on_axis = std::abs(z.real()) <= 1e-13 * scale;
    const double y0 = z.imag();

    double total = 0.0;
    for (int b = 0; b < p.bands.band_count(); ++b) {
        double lo, hi;
        p.bands.band(b, lo, hi);
        const double sgn = p.band_signs[static_cast<std::size_t>(b)];
        // A piece of a band; the near endpoint distance d either sharpens the
        // inverse-sqrt factor (piece endpoint = band endpoint) or the log
        // denominator (piece endpoint = on-axis singularity of the kernel).
        auto piece = [&](double plo, double phi, bool log_at_lo, bool log_at_hi) {
            return tanh_sinh_core(
                [&](double y, double d) {
                    const bool near_lo = y - plo < phi - y;
                    const bool log_near = near_lo ? log_at_lo : log_at_hi;
                    double e_near = near_lo ? plo : phi;
                    if (log_near || e_near <= 0.0) e_near = -1.0;
                    const double dens =
                        sgn * p.g_at(y) / (kPi * sqrt_abs_q(p.bands, e_near, y, d));
                    const Complex w(0.0, y);
                    const double num = std::abs(w - std::conj(z));
                    const double den = log_near ? d : std::abs(w - z);
                    return dens * std::log(num / den);
                },
                plo, phi, 1e-12);
        };
        if (on_axis && y0 > lo && y0 < hi) {
            total += piece(lo, y0, false, true);
            total += piece(y0, hi, true, false);
        } else {
            total += piece(lo, hi, false, false);
        }
    }
    return total;
}

std::function<double(double)> kdv_from_nls(std::function<double(Complex)> u_nls) {
    return [f = std::move(u_nls)](double zeta) {
        return 0.5 * f(Complex(0.0, zeta));
    };
}

}  // namespace ndr
