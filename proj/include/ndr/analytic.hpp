#pragma once

// Closed-form reference solutions: the semicircle and box condensates, the
// genus-2N bound-state condensate built from the gap-integral system for the
// monic polynomial P, and the fNLS -> KdV density mapping.

#include <functional>
#include <vector>

#include "ndr/geometry.hpp"

namespace ndr {

/// Tanh-sinh (double-exponential) quadrature of f on (a, b).  Integrable
/// endpoint singularities (inverse square root, logarithm) are handled
/// without substitutions.  `tol` is an absolute tolerance on the level
/// increment; non-finite integrand samples at underflowed endpoint distances
/// are dropped.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

struct CondensateValues {
    double u = 0.0;
    double v = 0.0;
};

/// Semicircle condensate of radius rho: u = Im z/(pi rho),
/// v = -4 Im(z^2)/(pi rho) on |z| = rho.  Throws when z is off the circle or
/// below the real axis.
CondensateValues semicircle_condensate(double rho, Complex z);

/// Box condensate on [0, iq]: u(iy) = y/(pi sqrt(q^2 - y^2)), v identically 0.
/// Throws "endpoint singularity" at y >= q and rejects z off the segment.
double box_condensate(double q, Complex z);

/// Vertical band systems on the imaginary axis.  OddBands holds the 2N+1
/// endpoints 0 < b0 < a1 < b1 < ... < aN < bN for bands
/// [0, ib0] u [ia_j, ib_j]; EvenBands holds 2N endpoints a1 < b1 < ... with
/// no band through the origin.
struct BandSystem {
    enum class Kind { OddBands, EvenBands };

    Kind kind = Kind::OddBands;
    std::vector<double> endpoints;

    static BandSystem odd(std::vector<double> endpoints);
    static BandSystem even(std::vector<double> endpoints);

    int gap_count() const;   // N for OddBands, N for EvenBands (incl. central)
    int band_count() const;
    void validate() const;   // strict positive ordering, parity of the list

    /// Band j as an interval [lo, hi] on the y axis, j in [0, band_count).
    void band(int j, double& lo, double& hi) const;
    /// Gap j as an interval on the positive y axis; for EvenBands gap 0 is
    /// the central half-gap (0, a1).
    void gap(int j, double& lo, double& hi) const;

    /// R(iy)^2, positive on bands and negative in gaps.
    double q_at(double y) const;
};

/// Monic polynomial P of Eq-of-motion degree 2N+1 (odd) or 2N (even) with the
/// free coefficients fixed by the vanishing gap integrals.
struct BandPolynomial {
    BandSystem bands;
    /// OddBands: (c_1, ..., c_N) with P(z) = z^{2N+1} + c_N z^{2N-1} + ... +
    /// c_1 z; EvenBands: (c_0, ..., c_{N-1}) with P(z) = z^{2N} + ... + c_0.
    std::vector<double> coefficients;
    std::vector<double> band_signs;  // per band, fixed by u > 0
    std::vector<double> gap_zeros;   // one verified zero per gap

    /// Real reduction g(y) of the density numerator: for OddBands
    /// g(y) = -i P(iy), for EvenBands g(y) = P(iy).
    double g_at(double y) const;
};

/// Gap integral int g(y)/sqrt(|Q(y)|) dy over gap j (tanh-sinh, tol 1e-12).
/// The zero set of these as functions of the coefficients defines P.
double gap_integral(const BandPolynomial& p, int j);

/// Solve the N x N linear gap-condition system for the free coefficients and
/// verify the one-zero-per-gap invariant and positivity of the density on the
/// bands.  Throws on a singular system or "branch/sign inconsistency".
BandPolynomial solve_band_polynomial(const BandSystem& bands);

/// Bound-state condensate density u(iy) = s_band g(y)/(pi sqrt(Q(y))) at
/// z = iy on a band.  Positive on the bands away from 0; throws for z in a
/// gap or at a band endpoint.
double bound_state_density(const BandPolynomial& p, Complex z);

/// Green potential G mu(z) of the bound-state condensate, integrated band by
/// band with tanh-sinh quadrature; a logarithmic interior singularity at
/// z = iy0 on a band is split off.  Equals Im z on the bands.
double bound_state_green_potential(const BandPolynomial& p, Complex z);

/// u_KdV(zeta) = 1/2 u_fNLS(i zeta): exact composition, no approximation.
std::function<double(double)> kdv_from_nls(std::function<double(Complex)> u_nls);

}  // namespace ndr
