#include "ndr/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace ndr {

namespace {

Complex read_point(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("config field '" + field +
                                    "' must be a [re, im] pair");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

SupportSpec parse_support(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("config field 'support' must be a non-empty array");
    SupportSpec spec;
    for (const auto& item : j) {
        const std::string type = item.at("type").get<std::string>();
        const std::string label = item.value("label", std::string{});
        if (type == "segment") {
            Segment s;
            s.from = read_point(item.at("from"), "support.from");
            s.to = read_point(item.at("to"), "support.to");
            spec.add(s, label);
        } else if (type == "arc") {
            CircularArc a;
            a.center = read_point(item.at("center"), "support.center");
            a.radius = item.at("radius").get<double>();
            a.angle_start = item.at("angle_start").get<double>();
            a.angle_end = item.at("angle_end").get<double>();
            spec.add(a, label);
        } else if (type == "rectangle") {
            Region r;
            r.shape = Region::Shape::Rectangle;
            r.center = read_point(item.at("center"), "support.center");
            r.half_width = item.at("half_width").get<double>();
            r.half_height = item.at("half_height").get<double>();
            spec.add(r, label);
        } else if (type == "halfdisk") {
            Region r;
            r.shape = Region::Shape::HalfDisk;
            r.center = read_point(item.at("center"), "support.center");
            r.radius = item.at("radius").get<double>();
            r.min_im = item.value("min_im", 0.0);
            spec.add(r, label);
        } else {
            throw std::invalid_argument("unknown support primitive type '" + type + "'");
        }
    }
    spec.validate();
    return spec;
}

KernelKind parse_kernel(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "nls_soliton") return KernelKind::soliton();
    if (family == "nls_breather") return KernelKind::breather(j.at("delta0").get<double>());
    if (family == "kdv") return KernelKind::kdv();
    throw std::invalid_argument("unknown kernel family '" + family + "'");
}

RhsKind parse_rhs(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "nls_density") return RhsKind::nls_density();
    if (family == "nls_temporal") return RhsKind::nls_temporal();
    if (family == "breather_density")
        return RhsKind::breather_density(j.at("delta0").get<double>());
    if (family == "breather_temporal")
        return RhsKind::breather_temporal(j.at("delta0").get<double>());
    if (family == "kdv_density") return RhsKind::kdv_density();
    if (family == "kdv_temporal") return RhsKind::kdv_temporal();
    if (family == "constant") return RhsKind::constant_value(j.at("value").get<double>());
    if (family == "tabulated")
        return RhsKind::tabulated(j.at("values").get<std::vector<double>>());
    throw std::invalid_argument("unknown rhs family '" + family + "'");
}

SigmaSpec parse_sigma(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return SigmaSpec::zero();
    if (kind == "constant") {
        const double c = j.at("value").get<double>();
        if (c < 0.0) throw std::invalid_argument("sigma must be nonnegative");
        return SigmaSpec::constant_value(c);
    }
    if (kind == "tabulated") {
        auto values = j.at("values").get<std::vector<double>>();
        for (double v : values)
            if (v < 0.0) throw std::invalid_argument("sigma must be nonnegative");
        return SigmaSpec::tabulated(std::move(values));
    }
    if (kind == "power_distance") {
        return SigmaSpec::power_distance(
            read_point(j.at("center"), "sigma.center"), j.at("exponent").get<double>(),
            j.value("scale", 1.0));
    }
    throw std::invalid_argument("unknown sigma kind '" + kind + "'");
}

OracleSpec parse_oracle(const nlohmann::json& j) {
    OracleSpec o;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "semicircle") {
        o.kind = OracleSpec::Kind::Semicircle;
        o.rho = j.at("rho").get<double>();
    } else if (kind == "box") {
        o.kind = OracleSpec::Kind::Box;
        o.q = j.at("q").get<double>();
    } else if (kind == "bound_state") {
        o.kind = OracleSpec::Kind::BoundState;
        o.bands = j.at("bands").get<std::vector<double>>();
    } else if (kind == "kdv_box") {
        o.kind = OracleSpec::Kind::KdvBox;
        o.q = j.at("q").get<double>();
    } else {
        throw std::invalid_argument("unknown oracle kind '" + kind + "'");
    }
    return o;
}

}  // namespace

std::function<double(Complex)> OracleSpec::density() const {
    switch (kind) {
        case Kind::None:
            return {};
        case Kind::Semicircle: {
            const double r = rho;
            return [r](Complex z) { return semicircle_condensate(r, z).u; };
        }
        case Kind::Box: {
            const double qq = q;
            return [qq](Complex z) { return box_condensate(qq, z); };
        }
        case Kind::BoundState: {
            auto p = std::make_shared<BandPolynomial>(
                solve_band_polynomial(BandSystem::odd(bands)));
            return [p](Complex z) { return bound_state_density(*p, z); };
        }
        case Kind::KdvBox: {
            const double qq = q;
            auto mapped = kdv_from_nls(
                [qq](Complex z) { return box_condensate(qq, z); });
            return [mapped](Complex z) { return mapped(z.real()); };
        }
    }
    return {};
}

ProblemConfig parse_config(const nlohmann::json& j) {
    ProblemConfig c;
    c.support = parse_support(j.at("support"));
    c.kernel = parse_kernel(j.at("kernel"));
    c.rhs = parse_rhs(j.at("rhs"));
    if (j.contains("temporal_rhs")) c.temporal_rhs = parse_rhs(j.at("temporal_rhs"));
    if (j.contains("sigma")) c.sigma = parse_sigma(j.at("sigma"));

    const auto& disc = j.at("discretization");
    if (disc.contains("nodes_per_unit"))
        c.nodes_per_unit = disc.at("nodes_per_unit").get<double>();
    if (disc.contains("cell_size")) c.cell_size = disc.at("cell_size").get<double>();
    if ((c.nodes_per_unit > 0.0) == (c.cell_size > 0.0))
        throw std::invalid_argument(
            "discretization needs exactly one of nodes_per_unit or cell_size");

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        c.tol = s.value("tol", 1e-10);
        c.max_iter = s.value("max_iter", 0);
        c.support_threshold = s.value("support_threshold", 0.0);
        if (c.tol <= 0.0) throw std::invalid_argument("solver.tol must be positive");
    }
    if (j.contains("oracle")) c.oracle = parse_oracle(j.at("oracle"));
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        c.tolerances.residual = t.value("residual", c.tolerances.residual);
        c.tolerances.offsupport = t.value("offsupport", c.tolerances.offsupport);
        c.tolerances.energy_identity =
            t.value("energy_identity", c.tolerances.energy_identity);
        c.tolerances.coverage = t.value("coverage", c.tolerances.coverage);
        c.tolerances.vacancy = t.value("vacancy", c.tolerances.vacancy);
        c.tolerances.psd = t.value("psd", c.tolerances.psd);
        c.tolerances.eq_of_state = t.value("eq_of_state", c.tolerances.eq_of_state);
    }
    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        c.states_path = o.value("states", c.states_path);
        c.report_path = o.value("report", c.report_path);
    }
    return c;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    try {
        return parse_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config schema error: ") + e.what());
    }
}

double support_length(const SupportSpec& spec) {
    double total = 0.0;
    for (const auto& prim : spec.primitives) {
        if (const auto* s = std::get_if<Segment>(&prim))
            total += s->length();
        else if (const auto* a = std::get_if<CircularArc>(&prim))
            total += a->length();
    }
    return total;
}

Quadrature discretize(const ProblemConfig& config) {
    if (config.cell_size > 0.0) return discretize_region(config.support, config.cell_size);
    return discretize_contour(config.support, config.nodes_per_unit);
}

Quadrature discretize_with_nodes(const SupportSpec& spec, int total_nodes) {
    const double length = support_length(spec);
    if (!(length > 0.0))
        throw std::invalid_argument("node-count discretization needs a 1D support");
    return discretize_contour(spec, total_nodes / length);
}

namespace {

void append_number(std::ostream& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf;
}

}  // namespace

void write_states_csv(const std::string& path, const Quadrature& q,
                      const Eigen::VectorXd& u, const Eigen::VectorXd* v,
                      const Eigen::VectorXd& residual_u,
                      const Eigen::VectorXd* residual_v,
                      const std::vector<char>& in_support,
                      const std::vector<char>& excluded) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "re,im,weight,u,v,s,residual_u,residual_v,in_support,excluded\n";
    for (std::size_t i = 0; i < q.size(); ++i) {
        const Eigen::Index k = static_cast<Eigen::Index>(i);
        append_number(out, q.nodes[i].real());
        out << ',';
        append_number(out, q.nodes[i].imag());
        out << ',';
        append_number(out, q.weights[i]);
        out << ',';
        append_number(out, u(k));
        out << ',';
        if (v) append_number(out, (*v)(k));
        out << ',';
        if (v && u(k) > 0.0) append_number(out, (*v)(k) / u(k));
        out << ',';
        append_number(out, residual_u(k));
        out << ',';
        if (residual_v) append_number(out, (*residual_v)(k));
        out << ',' << (in_support[i] ? 1 : 0) << ',' << (excluded[i] ? 1 : 0)
            << '\n';
    }
}

StatesTable read_states_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open states file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("re,im,weight,u,v,s,residual_u,residual_v", 0) != 0)
        throw std::invalid_argument("states csv: bad header");

    StatesTable t;
    std::vector<double> us, vs;
    bool any_v = false;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        while (fields.size() < 10) fields.emplace_back();
        if (fields.size() != 10)
            throw std::invalid_argument("states csv: wrong field count at line " +
                                        std::to_string(lineno));
        try {
            t.quad.nodes.emplace_back(std::stod(fields[0]), std::stod(fields[1]));
            t.quad.weights.push_back(std::stod(fields[2]));
            us.push_back(std::stod(fields[3]));
            if (!fields[4].empty()) {
                vs.push_back(std::stod(fields[4]));
                any_v = true;
            } else {
                vs.push_back(0.0);
            }
            t.in_support.push_back(fields[8] == "1");
            t.excluded.push_back(fields[9] == "1");
        } catch (const std::exception&) {
            throw std::invalid_argument("states csv: bad number at line " +
                                        std::to_string(lineno));
        }
    }
    t.u = Eigen::Map<const Eigen::VectorXd>(us.data(), static_cast<Eigen::Index>(us.size()));
    if (any_v)
        t.v = Eigen::Map<const Eigen::VectorXd>(vs.data(),
                                                static_cast<Eigen::Index>(vs.size()));
    return t;
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ConvergenceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "n,error,observed_order\n";
    for (const auto& row : rows) {
        out << row.n << ',';
        append_number(out, row.error);
        out << ',';
        append_number(out, row.observed_order);
        out << '\n';
    }
}

void write_kernel_dump(const std::string& path, const Eigen::MatrixXd& A,
                       KernelFamily family) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const std::uint64_t n = static_cast<std::uint64_t>(A.rows());
    std::uint64_t tag = 0;
    if (family == KernelFamily::NlsBreather) tag = 1;
    if (family == KernelFamily::Kdv) tag = 2;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&tag), 8);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            const double x = A(i, j);
            out.write(reinterpret_cast<const char*>(&x), 8);
        }
}

}  // namespace ndr
