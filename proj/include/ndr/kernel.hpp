#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ndr/geometry.hpp"

namespace ndr {

/// Log self-energy constant of the unit square,
/// -iint iint log|p-q| dp dq over [0,1]^2 x [0,1]^2.
inline constexpr double kUnitSquareLogMoment = 0.8050867219500871;

enum class KernelFamily { NlsSoliton, NlsBreather, Kdv };

struct KernelKind {
    KernelFamily family = KernelFamily::NlsSoliton;
    double delta0 = 0.0;

    static KernelKind soliton() { return {KernelFamily::NlsSoliton, 0.0}; }
    static KernelKind breather(double d0);
    static KernelKind kdv() { return {KernelFamily::Kdv, 0.0}; }
};

enum class RhsFamily {
    NlsDensity,
    NlsTemporal,
    BreatherDensity,
    BreatherTemporal,
    KdvDensity,
    KdvTemporal,
    Constant,
    Tabulated,
};

struct RhsKind {
    RhsFamily family = RhsFamily::NlsDensity;
    double delta0 = 0.0;               // breather kinds
    double constant = 0.0;             // Constant
    std::vector<double> values;        // Tabulated, indexed by node

    static RhsKind nls_density() { return {RhsFamily::NlsDensity}; }
    static RhsKind nls_temporal() { return {RhsFamily::NlsTemporal}; }
    static RhsKind breather_density(double d0) { return {RhsFamily::BreatherDensity, d0}; }
    static RhsKind breather_temporal(double d0) { return {RhsFamily::BreatherTemporal, d0}; }
    static RhsKind kdv_density() { return {RhsFamily::KdvDensity}; }
    static RhsKind kdv_temporal() { return {RhsFamily::KdvTemporal}; }
    static RhsKind constant_value(double m) { return {RhsFamily::Constant, 0.0, m}; }
    static RhsKind tabulated(std::vector<double> v) { return {RhsFamily::Tabulated, 0.0, 0.0, std::move(v)}; }

    /// True for the positive superharmonic right-hand sides of the density
    /// equations; the temporal kinds change sign.
    bool superharmonic() const;
};

struct SigmaSpec {
    enum class Kind { Zero, Constant, Tabulated, PowerDistance };

    Kind kind = Kind::Zero;
    double constant = 0.0;
    std::vector<double> values;        // Tabulated, indexed by node
    Complex a;                         // PowerDistance center
    double exponent = 0.0;
    double scale = 1.0;
    std::vector<double> factor;        // optional tabulated factor

    static SigmaSpec zero() { return {}; }
    static SigmaSpec constant_value(double c);
    static SigmaSpec tabulated(std::vector<double> v);
    static SigmaSpec power_distance(Complex a, double exponent, double scale,
                                    std::vector<double> factor = {});

    double value(std::size_t node_index, Complex z) const;
    bool identically_zero() const { return kind == Kind::Zero; }
};

///// Discretized energy: J(u) = u^T (A + diag(S)) u - 2 b^T u.
struct QuadraticForm {
    Eigen::MatrixXd A;   // Green-energy matrix including weights and self-energy diagonal
    Eigen::VectorXd S;   // sigma_i * w_i
    Eigen::VectorXd b;   // phi_i * w_i
    Quadrature quad;
    KernelKind kernel;
    RhsKind rhs;

    Eigen::MatrixXd system_matrix() const { return A + Eigen::MatrixXd(S.asDiagonal()); }
    double energy(const Eigen::VectorXd& u) const;
};

/// Green-kernel value, log|(w - conj z)/(w - z)| for the fNLS soliton gas;
/// the breather family adds the R0 correction term, the KdV family is the
/// half-line kernel log|(w + z)/(w - z)| on real positive arguments.
double kernel_value(KernelKind kind, Complex z, Complex w);

/// Right-hand side of the dispersion relation at z.
double rhs_value(const RhsKind& kind, Complex z);

/// Branch of sqrt(z^2 + delta0^2) with R0(z) ~ z at infinity.
Complex breather_r0(Complex z, double delta0);

QuadraticForm assemble_form(const Quadrature& q, KernelKind kernel, const RhsKind& rhs,
                            const SigmaSpec& sigma);

struct PotentialValue {
    double value = 0.0;
    bool at_node = false;
};

/// G mu (z) = sum_i K(z, z_i) u_i w_i; if z coincides with a node the
/// self-energy-corrected nodal value is returned with at_node set.
PotentialValue green_potential_at(const Quadrature& q, const Eigen::VectorXd& u,
                                  KernelKind kind, Complex z);

}  // namespace ndr
