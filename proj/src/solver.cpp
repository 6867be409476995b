#include "ndr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ndr {

namespace {

// Cholesky factor of the free-block M_FF kept current across single index
// moves.  Appending a column costs one triangular solve, removing one costs a
// trailing rank-one update; both are O(m^2).
class FreeBlockFactor {
  public:
    explicit FreeBlockFactor(const Eigen::MatrixXd& M) : M_(M) {}

    const std::vector<int>& order() const { return order_; }
    int size() const { return static_cast<int>(order_.size()); }

    bool reset(const std::vector<int>& indices) {
        order_ = indices;
        const int m = size();
        Eigen::MatrixXd Mff(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Mff(i, j) = M_(order_[i], order_[j]);
        Eigen::LLT<Eigen::MatrixXd> llt(Mff);
        if (llt.info() != Eigen::Success) return false;
        L_ = llt.matrixL();
        return true;
    }

    bool append(int j) {
        const int m = size();
        Eigen::VectorXd c(m);
        for (int i = 0; i < m; ++i) c(i) = M_(order_[i], j);
        Eigen::VectorXd l =
            L_.topLeftCorner(m, m).triangularView<Eigen::Lower>().solve(c);
        const double d2 = M_(j, j) - l.squaredNorm();
        if (!(d2 > 0.0)) return false;
        L_.conservativeResize(m + 1, m + 1);
        L_.row(m).head(m) = l.transpose();
        L_.col(m).head(m).setZero();
        L_(m, m) = std::sqrt(d2);
        order_.push_back(j);
        return true;
    }

    void remove_at(int pos) {
        const int m = size();
        const int t = m - 1 - pos;
        Eigen::VectorXd x = L_.col(pos).segment(pos + 1, t);
        // Shift rows/columns past pos up and left (ascending order, no overlap).
        for (int i = pos + 1; i < m; ++i) {
            for (int j = 0; j < pos; ++j) L_(i - 1, j) = L_(i, j);
            for (int j = pos + 1; j <= i; ++j) L_(i - 1, j - 1) = L_(i, j);
        }
        L_.conservativeResize(m - 1, m - 1);
        order_.erase(order_.begin() + pos);
        // Rank-one update of the trailing block: L33 L33^T += x x^T.
        for (int k = 0; k < t; ++k) {
            const int kk = pos + k;
            const double r = std::hypot(L_(kk, kk), x(k));
            const double c = r / L_(kk, kk);
            const double s = x(k) / L_(kk, kk);
            L_(kk, kk) = r;
            for (int i = k + 1; i < t; ++i) {
                const int ii = pos + i;
                L_(ii, kk) = (L_(ii, kk) + s * x(i)) / c;
                x(i) = c * x(i) - s * L_(ii, kk);
            }
        }
    }

    // Solve M_FF y = rhs where rhs is indexed in factor order.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        const int m = size();
        Eigen::VectorXd y =
            L_.topLeftCorner(m, m).triangularView<Eigen::Lower>().solve(rhs);
        L_.topLeftCorner(m, m)
            .triangularView<Eigen::Lower>()
            .transpose()
            .solveInPlace(y);
        return y;
    }

  private:
    const Eigen::MatrixXd& M_;
    std::vector<int> order_;
    Eigen::MatrixXd L_;
};

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
    return out;
}

std::vector<char> build_mask(const Eigen::VectorXd& u, double threshold) {
    std::vector<char> mask(static_cast<std::size_t>(u.size()), 0);
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u(i) > threshold) mask[static_cast<std::size_t>(i)] = 1;
    return mask;
}

}  // namespace

double DiscreteMeasure::mass() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) m += u(i) * quad.weights[static_cast<std::size_t>(i)];
    return m;
}

int DiscreteMeasure::support_count() const {
    int c = 0;
    for (char f : support_mask) c += f ? 1 : 0;
    return c;
}

Eigen::VectorXd variational_residual(const QuadraticForm& form,
                                     const Eigen::VectorXd& u) {
    if (u.size() != form.b.size())
        throw std::invalid_argument("residual: size mismatch");
    Eigen::VectorXd r = form.A * u + form.S.cwiseProduct(u) - form.b;
    for (Eigen::Index i = 0; i < r.size(); ++i)
        r(i) /= form.quad.weights[static_cast<std::size_t>(i)];
    return r;
}

DiscreteMeasure solve_nonnegative(const QuadraticForm& form, SolveReport& report,
                                  const SolverOptions& options) {
    const int n = static_cast<int>(form.b.size());
    const Eigen::MatrixXd M = form.system_matrix();
    report = SolveReport{};

    // Physical-units residual scale; stationarity is (M u - b)/w = 0.
    double bscale = 0.0;
    for (int i = 0; i < n; ++i)
        bscale = std::max(bscale,
                          std::abs(form.b(i)) / form.quad.weights[static_cast<std::size_t>(i)]);
    const double tol = options.kkt_tolerance * std::max(1.0, bscale);

    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

    FreeBlockFactor factor(M);
    if (!factor.reset(all)) {
        report.status = SolveStatus::NotPositiveDefinite;
        return DiscreteMeasure{form.quad, Eigen::VectorXd::Zero(n), false, {}, 0.0};
    }
    std::vector<char> is_free(static_cast<std::size_t>(n), 1);

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    bool converged = false;

    while (report.iterations < options.max_iterations) {
        ++report.iterations;
        const std::vector<int>& free = factor.order();
        Eigen::VectorXd x;
        if (!free.empty()) x = factor.solve(gather(form.b, free));

        // Pin the most negative free variable, one per iteration.
        int worst_pos = -1;
        double worst = 0.0;  // any strictly negative value counts
        for (int p = 0; p < static_cast<int>(free.size()); ++p) {
            if (x(p) < worst) {
                worst = x(p);
                worst_pos = p;
            }
        }
        if (worst_pos >= 0) {
            is_free[static_cast<std::size_t>(free[static_cast<std::size_t>(worst_pos)])] = 0;
            factor.remove_at(worst_pos);
            ++report.active_set_changes;
            continue;
        }

        u.setZero();
        for (int p = 0; p < static_cast<int>(free.size()); ++p)
            u(free[static_cast<std::size_t>(p)]) = std::max(x(p), 0.0);

        // Dual feasibility on the bound set; release the worst violator.
        Eigen::VectorXd r = variational_residual(form, u);
        int release = -1;
        double most_negative = -tol;
        for (int i = 0; i < n; ++i) {
            if (is_free[static_cast<std::size_t>(i)]) continue;
            if (r(i) < most_negative) {
                most_negative = r(i);
                release = i;
            }
        }
        if (release >= 0) {
            if (!factor.append(release)) {
                report.status = SolveStatus::NotPositiveDefinite;
                return DiscreteMeasure{form.quad, u, false, {}, 0.0};
            }
            is_free[static_cast<std::size_t>(release)] = 1;
            ++report.active_set_changes;
            continue;
        }
        converged = true;
        break;
    }

    if (!converged) {
        report.status = SolveStatus::MaxIterations;
    } else if (options.verify_final && factor.size() > 0) {
        // Fresh factorization of the final free block for a machine-accurate
        // solution; the incrementally updated factor accumulates drift.
        std::vector<int> free = factor.order();
        std::sort(free.begin(), free.end());
        FreeBlockFactor fresh(M);
        if (fresh.reset(free)) {
            Eigen::VectorXd x = fresh.solve(gather(form.b, free));
            u.setZero();
            for (std::size_t p = 0; p < free.size(); ++p)
                u(free[p]) = std::max(x(static_cast<Eigen::Index>(p)), 0.0);
        }
    }

    Eigen::VectorXd r = variational_residual(form, u);
    double kkt = 0.0;
    for (int i = 0; i < n; ++i) {
        if (is_free[static_cast<std::size_t>(i)] && u(i) > 0.0)
            kkt = std::max(kkt, std::abs(r(i)));
        else
            kkt = std::max(kkt, std::max(0.0, -r(i)));
    }
    report.kkt_residual = kkt;
    report.energy = form.energy(u);

    DiscreteMeasure out;
    out.quad = form.quad;
    out.u = u;
    out.is_signed = false;
    out.support_threshold = kDefaultSupportFraction * u.maxCoeff();
    out.support_mask = build_mask(u, out.support_threshold);
    return out;
}

DiscreteMeasure solve_signed(const QuadraticForm& form, SolveReport& report,
                             const std::optional<std::vector<char>>& mask,
                             const SolverOptions& options) {
    const int n = static_cast<int>(form.b.size());
    report = SolveReport{};
    report.iterations = 1;

    std::vector<int> idx;
    if (mask) {
        if (static_cast<int>(mask->size()) != n)
            throw std::invalid_argument("support mask size mismatch");
        for (int i = 0; i < n; ++i)
            if ((*mask)[static_cast<std::size_t>(i)]) idx.push_back(i);
    } else {
        idx.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    }
    if (idx.empty()) throw std::invalid_argument("degenerate support");

    const Eigen::MatrixXd M = form.system_matrix();
    FreeBlockFactor factor(M);
    if (!factor.reset(idx)) {
        report.status = SolveStatus::NotPositiveDefinite;
        return DiscreteMeasure{form.quad, Eigen::VectorXd::Zero(n), true, {}, 0.0};
    }
    Eigen::VectorXd x = factor.solve(gather(form.b, idx));

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (std::size_t p = 0; p < idx.size(); ++p)
        v(idx[p]) = x(static_cast<Eigen::Index>(p));

    Eigen::VectorXd r = variational_residual(form, v);
    double res = 0.0;
    for (int i : idx) res = std::max(res, std::abs(r(i)));
    report.kkt_residual = res;
    report.energy = form.energy(v);

    double bscale = 0.0;
    for (int i = 0; i < n; ++i)
        bscale = std::max(bscale,
                          std::abs(form.b(i)) / form.quad.weights[static_cast<std::size_t>(i)]);
    if (res > options.kkt_tolerance * std::max(1.0, bscale) * 1e3)
        report.status = SolveStatus::MaxIterations;

    DiscreteMeasure out;
    out.quad = form.quad;
    out.u = v;
    out.is_signed = true;
    out.support_mask.assign(static_cast<std::size_t>(n), 0);
    for (int i : idx) out.support_mask[static_cast<std::size_t>(i)] = 1;
    out.support_threshold = 0.0;
    return out;
}

double splitting_crosscheck(const QuadraticForm& form, const DiscreteMeasure& u,
                            double shift) {
    const int n = static_cast<int>(form.b.size());
    if (u.size() != n) throw std::invalid_argument("measure size mismatch");

    double phimax = 0.0;
    for (int i = 0; i < n; ++i)
        phimax = std::max(phimax,
                          std::abs(form.b(i)) / form.quad.weights[static_cast<std::size_t>(i)]);
    const double m_shift = shift > 0.0 ? shift : 2.0 * std::max(phimax, 1.0);

    // Restrict both shifted solves to the support of u, where the shifted
    // densities are strictly positive and the sign constraint is inactive.
    QuadraticForm shifted = form;
    QuadraticForm constant = form;
    for (int i = 0; i < n; ++i) {
        const double w = form.quad.weights[static_cast<std::size_t>(i)];
        shifted.b(i) = form.b(i) + m_shift * w;
        constant.b(i) = m_shift * w;
    }
    shifted.rhs = RhsKind::tabulated([&] {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] =
                shifted.b(i) / form.quad.weights[static_cast<std::size_t>(i)];
        return v;
    }());
    constant.rhs = RhsKind::constant_value(m_shift);

    SolveReport r2, r1;
    DiscreteMeasure u2 = solve_signed(shifted, r2, u.support_mask);
    DiscreteMeasure u1 = solve_signed(constant, r1, u.support_mask);

    const double scale = std::max(u.u.cwiseAbs().maxCoeff(),
                                  std::numeric_limits<double>::min());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!u.support_mask[static_cast<std::size_t>(i)]) continue;
        worst = std::max(worst, std::abs(u2.u(i) - u1.u(i) - u.u(i)));
    }
    return worst / scale;
}

}  // namespace ndr
