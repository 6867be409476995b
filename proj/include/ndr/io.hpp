#pragma once

// Problem configurations (single JSON document) and artifact writers:
// states.csv, report.json, convergence.csv, and the dense binary kernel dump.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ndr/analytic.hpp"
#include "ndr/diagnose.hpp"
#include "ndr/kernel.hpp"
#include "ndr/solver.hpp"

namespace ndr {

/// Oracle selection for converge runs and solve-time comparisons.
struct OracleSpec {
    enum class Kind { None, Semicircle, Box, BoundState, KdvBox };
    Kind kind = Kind::None;
    double rho = 1.0;                 // Semicircle
    double q = 1.0;                   // Box, KdvBox
    std::vector<double> bands;        // BoundState (odd endpoints list)

    /// Density oracle as a function of the spectral point; empty for None.
    std::function<double(Complex)> density() const;
};

struct ProblemConfig {
    SupportSpec support;
    KernelKind kernel;
    RhsKind rhs = RhsKind::nls_density();
    std::optional<RhsKind> temporal_rhs;
    SigmaSpec sigma;
    double nodes_per_unit = 0.0;      // 1D discretization
    double cell_size = 0.0;           // 2D discretization
    double tol = 1e-10;
    int max_iter = 0;                 // 0 -> 10 n
    double support_threshold = 0.0;   // 0 -> solver default
    OracleSpec oracle;
    Tolerances tolerances;
    std::string states_path = "states.csv";
    std::string report_path = "report.json";
};

ProblemConfig parse_config(const nlohmann::json& j);

/// Throws std::invalid_argument with a field diagnostic on malformed input.
ProblemConfig load_config(const std::string& path);

/// Total 1D length of the support (0 for region supports).
double support_length(const SupportSpec& spec);

Quadrature discretize(const ProblemConfig& config);

/// Discretize with roughly `total_nodes` nodes (1D supports).
Quadrature discretize_with_nodes(const SupportSpec& spec, int total_nodes);

/// states.csv with columns re,im,weight,u,v,s,residual_u,residual_v,
/// in_support,excluded; the v, s and residual_v columns are left empty when
/// no temporal solve was made.  Numbers carry 17 significant digits.
void write_states_csv(const std::string& path, const Quadrature& q,
                      const Eigen::VectorXd& u, const Eigen::VectorXd* v,
                      const Eigen::VectorXd& residual_u,
                      const Eigen::VectorXd* residual_v,
                      const std::vector<char>& in_support,
                      const std::vector<char>& excluded);

struct StatesTable {
    Quadrature quad;   // nodes/weights only (flags left empty)
    Eigen::VectorXd u;
    std::optional<Eigen::VectorXd> v;
    std::vector<char> in_support;
    std::vector<char> excluded;
};

StatesTable read_states_csv(const std::string& path);

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows);

/// Dense binary dump of a kernel matrix: 16-byte header (uint64 n, uint64
/// kind tag: 0 soliton, 1 breather, 2 kdv), then n*n row-major doubles.
void write_kernel_dump(const std::string& path, const Eigen::MatrixXd& A,
                       KernelFamily family);

}  // namespace ndr
