#include "ndr/kernel.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ndr {

namespace {

constexpr double kCoincidenceTol = 1e-14;

bool on_real_line(Complex z) { return std::abs(z.imag()) <= kCoincidenceTol * std::max(1.0, std::abs(z)); }

void check_domain(KernelKind kind, Complex z) {
    if (kind.family == KernelFamily::Kdv) {
        if (!on_real_line(z) || z.real() <= 0.0)
            throw std::invalid_argument("KdV kernel requires real positive arguments");
    } else if (z.imag() < 0.0) {
        throw std::invalid_argument("kernel argument below the real axis");
    }
}

double breather_extra(Complex z, Complex w, double d0) {
    const Complex rz = breather_r0(z, d0);
    const Complex rzb = breather_r0(std::conj(z), d0);
    const Complex rw = breather_r0(w, d0);
    const double d2 = d0 * d0;
    return std::log(std::abs((rz * rw + z * w + d2) / (rzb * rw + std::conj(z) * w + d2)));
}

/// Smooth part of the kernel at coincidence w = z (the image term; the
/// -log|w - z| singularity is handled by the panel self-energy).
double smooth_coincidence(KernelKind kind, Complex z) {
    switch (kind.family) {
        case KernelFamily::NlsSoliton:
            return std::log(2.0 * z.imag());
        case KernelFamily::Kdv:
            return std::log(2.0 * z.real());
        case KernelFamily::NlsBreather:
            return std::log(2.0 * z.imag()) + breather_extra(z, z, kind.delta0);
    }
    return 0.0;
}

unsigned worker_count() {
    if (const char* env = std::getenv("NDR_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return unsigned(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_rows(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<unsigned>(worker_count(), unsigned(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += workers) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

KernelKind KernelKind::breather(double d0) {
    if (d0 <= 0.0) throw std::invalid_argument("breather delta0 must be positive");
    return {KernelFamily::NlsBreather, d0};
}

SigmaSpec SigmaSpec::constant_value(double c) {
    if (c < 0.0) throw std::invalid_argument("sigma must be non-negative");
    SigmaSpec s;
    s.kind = Kind::Constant;
    s.constant = c;
    return s;
}

SigmaSpec SigmaSpec::tabulated(std::vector<double> v) {
    SigmaSpec s;
    s.kind = Kind::Tabulated;
    s.values = std::move(v);
    return s;
}

SigmaSpec SigmaSpec::power_distance(Complex a, double exponent, double scale,
                                    std::vector<double> factor) {
    if (scale <= 0.0) throw std::invalid_argument("power-distance scale must be positive");
    SigmaSpec s;
    s.kind = Kind::PowerDistance;
    s.a = a;
    s.exponent = exponent;
    s.scale = scale;
    s.factor = std::move(factor);
    return s;
}

double SigmaSpec::value(std::size_t i, Complex z) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::Constant:
            return constant;
        case Kind::Tabulated:
            if (i >= values.size()) throw std::out_of_range("tabulated sigma: node index out of range");
            return values[i];
        case Kind::PowerDistance: {
            const double f = factor.empty() ? 1.0 : factor.at(i);
            return scale * std::pow(std::abs(z - a), exponent) * f;
        }
    }
    return 0.0;
}

bool RhsKind::superharmonic() const {
    switch (family) {
        case RhsFamily::NlsDensity:
        case RhsFamily::BreatherDensity:
        case RhsFamily::KdvDensity:
            return true;
        case RhsFamily::Constant:
            return constant > 0.0;
        default:
            return false;
    }
}

Complex breather_r0(Complex z, double d0) {
    Complex r = std::sqrt(z * z + d0 * d0);
    if (r.real() * z.real() + r.imag() * z.imag() < 0.0) r = -r;
    return r;
}

double kernel_value(KernelKind kind, Complex z, Complex w) {
    check_domain(kind, z);
    check_domain(kind, w);
    if (std::abs(z - w) <= kCoincidenceTol * std::max(1.0, std::abs(z)))
        throw std::invalid_argument("kernel singular on diagonal");
    if (kind.family == KernelFamily::Kdv) {
        const double a = z.real(), b = w.real();
        return std::log((b + a) / std::abs(b - a));
    }
    double v = std::log(std::abs((w - std::conj(z)) / (w - z)));
    if (kind.family == KernelFamily::NlsBreather) v += breather_extra(z, w, kind.delta0);
    return v;
}

double rhs_value(const RhsKind& kind, Complex z) {
    switch (kind.family) {
        case RhsFamily::NlsDensity:
            return z.imag();
        case RhsFamily::NlsTemporal:
            return -4.0 * z.imag() * z.real();
        case RhsFamily::BreatherDensity:
            return breather_r0(z, kind.delta0).imag();
        case RhsFamily::BreatherTemporal:
            return -2.0 * (z * breather_r0(z, kind.delta0)).imag();
        case RhsFamily::KdvDensity:
            return 0.5 * z.real();
        case RhsFamily::KdvTemporal:
            return -2.0 * std::pow(z.real(), 3);
        case RhsFamily::Constant:
            return kind.constant;
        case RhsFamily::Tabulated:
            throw std::invalid_argument("tabulated rhs has no pointwise formula; use node values");
    }
    return 0.0;
}

double QuadraticForm::energy(const Eigen::VectorXd& u) const {
    return u.dot(A * u) + u.dot(S.cwiseProduct(u)) - 2.0 * b.dot(u);
}

QuadraticForm assemble_form(const Quadrature& q, KernelKind kernel, const RhsKind& rhs,
                            const SigmaSpec& sigma) {
    const std::size_t n = q.size();
    if (n == 0) throw std::invalid_argument("empty quadrature");
    if (rhs.family == RhsFamily::Tabulated && rhs.values.size() != n)
        throw std::invalid_argument("tabulated rhs length mismatch");

    QuadraticForm form;
    form.quad = q;
    form.kernel = kernel;
    form.rhs = rhs;
    form.A.resize(n, n);
    form.S.resize(n);
    form.b.resize(n);

    parallel_rows(n, [&](std::size_t i) {
        const Complex zi = q.nodes[i];
        const double wi = q.weights[i];
        for (std::size_t j = 0; j < i; ++j) {
            const double v = wi * q.weights[j] * kernel_value(kernel, zi, q.nodes[j]);
            form.A(i, j) = v;
            form.A(j, i) = v;
        }
        // diagonal: smooth part at coincidence plus exact log self-energy of the cell
        const double smooth = smooth_coincidence(kernel, zi);
        if (q.two_dimensional) {
            form.A(i, i) = wi * wi * (smooth + std::log(1.0 / std::sqrt(wi)) + kUnitSquareLogMoment);
        } else {
            form.A(i, i) = wi * wi * (smooth + 1.5 - std::log(wi));
        }
    });

    for (std::size_t i = 0; i < n; ++i) {
        const double sv = sigma.value(i, q.nodes[i]);
        if (sv < 0.0)
            throw std::invalid_argument("sigma must be non-negative (node " + std::to_string(i) + ")");
        form.S(i) = sv * q.weights[i];
        form.b(i) = (rhs.family == RhsFamily::Tabulated ? rhs.values[i] : rhs_value(rhs, q.nodes[i])) *
                    q.weights[i];
    }
    return form;
}

PotentialValue green_potential_at(const Quadrature& q, const Eigen::VectorXd& u,
                                  KernelKind kind, Complex z) {
    PotentialValue out;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Complex zi = q.nodes[i];
        if (std::abs(z - zi) <= kCoincidenceTol * std::max(1.0, std::abs(zi))) {
            // nodal value with the cell self-energy in place of the singular term
            const double smooth = smooth_coincidence(kind, zi);
            const double wi = q.weights[i];
            const double self = q.two_dimensional
                ? wi * (smooth + std::log(1.0 / std::sqrt(wi)) + kUnitSquareLogMoment)
                : wi * (smooth + 1.5 - std::log(wi));
            acc += self * u[Eigen::Index(i)];
            out.at_node = true;
            continue;
        }
        acc += kernel_value(kind, z, zi) * u[Eigen::Index(i)] * q.weights[i];
    }
    out.value = acc;
    return out;
}

}  // namespace ndr
