#pragma once

// Verification suite: variational conditions, energy identity, support
// geometry (outer-boundary coverage, interior vacancy), positive
// semidefiniteness of the Green matrix, the equation of state, and
// oracle-backed convergence studies.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ndr/kernel.hpp"
#include "ndr/solver.hpp"

namespace ndr {

struct Tolerances {
    double residual = 1e-8;         // variational residual on support
    double offsupport = 1e-8;       // allowed negativity off support
    double energy_identity = 1e-6;
    double coverage = 0.99;         // outer-boundary coverage fraction
    double vacancy = 0.99;          // interior vacancy fraction (2D)
    double psd = 1e-10;             // relative eigenvalue floor
    double eq_of_state = 5e-2;
    double support_threshold = 0.0;  // 0: take the measure's own threshold
};

struct VerificationReport {
    double max_support_residual = 0.0;
    double min_offsupport_residual = 0.0;
    double energy_identity_gap = 0.0;
    double outer_boundary_coverage = 0.0;
    double interior_vacancy = 0.0;
    double psd_min_eigenvalue = 0.0;
    double eq_of_state_max_residual = 0.0;
    double max_excluded_residual = 0.0;  // exclusion zones, reported apart
    std::map<std::string, bool> pass_flags;
    std::vector<std::string> notes;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

/// Nodes inside the exclusion zones: within 3 cell sizes of a corner point
/// or (for upper-half-plane kernels) within 1e-3 * diam of the real axis.
std::vector<char> exclusion_mask(const Quadrature& q, const SupportSpec& spec,
                                 bool exclude_real_axis = true);

/// Residual bounds of the variational conditions: G mu + sigma u = phi on the
/// support, G mu >= phi (residual >= 0) off it.  Excluded nodes are tracked
/// in max_excluded_residual, never silently dropped.  Also fills the energy
/// identity gap |J(u) + sum phi_i u_i w_i|.
VerificationReport verify_variational(const QuadraticForm& form,
                                      const DiscreteMeasure& measure,
                                      const SupportSpec& spec,
                                      const Tolerances& tol);

/// Coverage: fraction of outer-boundary nodes carrying density (expected 1
/// for positive superharmonic phi).  Vacancy: fraction of interior 2D nodes
/// without density (expected 1 when sigma = 0 on the enclosing boundary).
/// Results are merged into `report`; the coverage check is skipped with a
/// note when `superharmonic` is false.
void check_support_geometry(const DiscreteMeasure& measure, const SupportSpec& spec,
                            bool superharmonic, bool sigma_zero_on_boundary,
                            const Tolerances& tol, VerificationReport& report);

/// Max residual of the equation of state s = s0 + (1/Im z) sum_j K [s_i-s_j]
/// u_j w_j with s = v/u, s0 = -4 Re z, over nodes with u above threshold.
/// Throws "empty support" when no node qualifies.
double equation_of_state_residual(const Quadrature& q, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& v, KernelKind kind,
                                  double threshold);

/// Criterion metric for oracle comparisons: max_i |err_i| * min(1, sqrt(d_i))
/// / max_j |oracle_j| outside the exclusion zones, d_i the distance to the
/// nearest corner point.
double weighted_oracle_error(const Quadrature& q, const Eigen::VectorXd& u,
                             const std::function<double(Complex)>& oracle,
                             const SupportSpec& spec,
                             bool exclude_real_axis = true);

struct ConvergenceRow {
    int n = 0;
    double error = 0.0;
    double observed_order = 0.0;  // 0 for the first row
};

/// Solve at each n and compare against the analytic oracle in plain relative
/// max norm, with the exclusion zones frozen from the coarsest run so the
/// refinement sequence measures the same region throughout.
std::vector<ConvergenceRow> convergence_study(
    const std::function<QuadraticForm(int)>& assemble,
    const std::function<double(Complex)>& oracle, const SupportSpec& spec,
    const std::vector<int>& node_counts, bool exclude_real_axis = true);

/// Minimum eigenvalue of the Green matrix A (sigma excluded) by a dense
/// symmetric eigensolve; throws when n exceeds `dense_limit`.
double psd_check(const QuadraticForm& form, int dense_limit = 3000);

}  // namespace ndr
