#pragma once

// Constrained and unconstrained solvers for the discretized NDR system.
//
// The nonnegative problem is the KKT system of
//     min_u  u^T M u - 2 b^T u   s.t.  u >= 0,
// with M = A + diag(S) the discretized Green operator plus sigma diagonal.
// It is solved by a primal active-set method that keeps a Cholesky factor of
// the free block up to date across single index moves.  The signed companion
// system drops the constraint and solves M v = b_v on the support of u.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ndr/kernel.hpp"

namespace ndr {

enum class SolveStatus { Converged, MaxIterations, NotPositiveDefinite };

struct SolveReport {
    SolveStatus status = SolveStatus::Converged;
    int iterations = 0;          // active-set moves (1 for a direct solve)
    double kkt_residual = 0.0;   // physical-units KKT / linear residual
    double energy = 0.0;         // u^T M u - 2 b^T u
    int active_set_changes = 0;  // indices pinned or released

    bool ok() const { return status == SolveStatus::Converged; }
};

struct SolverOptions {
    int max_iterations = 50000;
    double kkt_tolerance = 1e-10;  // relative, on physical-units residuals
    bool verify_final = true;      // refactor the free block once converged
};

/// Discrete measure on the quadrature nodes.  For the density problem u >= 0
/// and support_mask marks nodes with u above support_threshold; the signed
/// companion v inherits the mask from the density solve.
struct DiscreteMeasure {
    Quadrature quad;
    Eigen::VectorXd u;
    bool is_signed = false;
    std::vector<char> support_mask;  // size n, 1 = in support
    double support_threshold = 0.0;

    int size() const { return static_cast<int>(u.size()); }
    double mass() const;  // sum u_i w_i
    int support_count() const;
};

/// Relative threshold applied to max_i u_i when building the support mask.
inline constexpr double kDefaultSupportFraction = 1e-8;

/// Componentwise variational residual in physical units,
/// r_i = ((M u)_i - b_i) / w_i.
Eigen::VectorXd variational_residual(const QuadraticForm& form,
                                     const Eigen::VectorXd& u);

/// Nonnegative solve.  A non-converged outcome is reported through `report`;
/// exceptions are reserved for broken inputs.
DiscreteMeasure solve_nonnegative(const QuadraticForm& form, SolveReport& report,
                                  const SolverOptions& options = {});

/// Signed solve restricted to `mask` (default: all nodes).  Nodes outside the
/// mask get v = 0.  Throws std::invalid_argument("degenerate support") when
/// the mask is empty.
DiscreteMeasure solve_signed(const QuadraticForm& form, SolveReport& report,
                             const std::optional<std::vector<char>>& mask = {},
                             const SolverOptions& options = {});

/// Linearity cross-check: solve with rhs phi + M and with the constant rhs M
/// separately; both stay strictly positive on the support of u, so the
/// difference of the two unconstrained-on-support solves must reproduce u.
/// Returns the maximum discrepancy over the support relative to max |u|.
/// shift = 0 picks M = 2 max|phi|.
double splitting_crosscheck(const QuadraticForm& form, const DiscreteMeasure& u,
                            double shift = 0.0);

}  // namespace ndr
