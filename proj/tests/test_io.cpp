#include "doctest.h"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "ndr/io.hpp"

using ndr::Complex;
using ndr::ProblemConfig;

namespace {

nlohmann::json minimal_config() {
    return nlohmann::json::parse(R"({
      "support": [{"type": "segment", "from": [0.0, 0.1], "to": [0.0, 1.0]}],
      "kernel": {"family": "nls_soliton"},
      "rhs": {"family": "nls_density"},
      "sigma": {"kind": "zero"},
      "discretization": {"nodes_per_unit": 50}
    })");
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("ndr_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing covers all tagged unions") {
    auto j = minimal_config();
    j["support"].push_back({{"type", "arc"},
                            {"center", {0.0, 0.0}},
                            {"radius", 2.0},
                            {"angle_start", 0.1},
                            {"angle_end", 3.0}});
    j["kernel"] = {{"family", "nls_breather"}, {"delta0", 0.5}};
    j["rhs"] = {{"family", "breather_density"}, {"delta0", 0.5}};
    j["temporal_rhs"] = {{"family", "breather_temporal"}, {"delta0", 0.5}};
    j["sigma"] = {{"kind", "constant"}, {"value", 0.25}};
    j["solver"] = {{"tol", 1e-9}, {"max_iter", 500}};
    j["oracle"] = {{"kind", "box"}, {"q", 1.0}};
    const ProblemConfig c = ndr::parse_config(j);
    CHECK(c.kernel.family == ndr::KernelFamily::NlsBreather);
    CHECK(c.kernel.delta0 == 0.5);
    CHECK(c.temporal_rhs.has_value());
    CHECK(c.tol == 1e-9);
    CHECK(c.max_iter == 500);
    CHECK(c.oracle.kind == ndr::OracleSpec::Kind::Box);
    CHECK(c.support.primitives.size() == 2);
}

TEST_CASE("config validation failures carry field diagnostics") {
    auto bad_sigma = minimal_config();
    bad_sigma["sigma"] = {{"kind", "constant"}, {"value", -1.0}};
    CHECK_THROWS_AS(ndr::parse_config(bad_sigma), std::invalid_argument);

    auto bad_disc = minimal_config();
    bad_disc["discretization"] = {{"nodes_per_unit", 50}, {"cell_size", 0.1}};
    CHECK_THROWS_AS(ndr::parse_config(bad_disc), std::invalid_argument);

    auto bad_type = minimal_config();
    bad_type["support"][0]["type"] = "banana";
    CHECK_THROWS_AS(ndr::parse_config(bad_type), std::invalid_argument);

    CHECK_THROWS_AS(ndr::load_config("/nonexistent/ndr.json"), std::invalid_argument);
}

TEST_CASE("oracle spec produces callable densities") {
    ndr::OracleSpec o;
    CHECK_FALSE(o.density());
    o.kind = ndr::OracleSpec::Kind::Semicircle;
    o.rho = 1.0;
    auto f = o.density();
    REQUIRE(f);
    CHECK(f(Complex(0.0, 1.0)) == doctest::Approx(1.0 / std::acos(-1.0)));
    o.kind = ndr::OracleSpec::Kind::KdvBox;
    o.q = 1.0;
    auto g = o.density();
    CHECK(g(Complex(0.6, 0.0)) ==
          doctest::Approx(0.5 * 0.6 / (0.8 * std::acos(-1.0))));
}

TEST_CASE("states csv round trip at 17 significant digits") {
    TempDir tmp;
    const ProblemConfig c = ndr::parse_config(minimal_config());
    const auto q = ndr::discretize(c);
    const Eigen::Index n = static_cast<Eigen::Index>(q.size());
    Eigen::VectorXd u(n), v(n), ru(n), rv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        u(i) = 1.0 / 3.0 + 1e-12 * i;
        v(i) = -2.0 / 7.0 * i;
        ru(i) = 1e-11 * i;
        rv(i) = -1e-11 * i;
    }
    std::vector<char> in_support(q.size(), 1), excluded(q.size(), 0);
    excluded[0] = 1;
    const std::string path = (tmp.path / "states.csv").string();
    ndr::write_states_csv(path, q, u, &v, ru, &rv, in_support, excluded);

    const ndr::StatesTable table = ndr::read_states_csv(path);
    REQUIRE(table.u.size() == n);
    REQUIRE(table.v.has_value());
    CHECK((table.u - u).cwiseAbs().maxCoeff() == 0.0);  // lossless round trip
    CHECK((*table.v - v).cwiseAbs().maxCoeff() == 0.0);
    CHECK(table.excluded[0] == 1);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(table.quad.nodes[i] == q.nodes[i]);
        CHECK(table.quad.weights[i] == q.weights[i]);
    }
}

TEST_CASE("states csv without a temporal column") {
    TempDir tmp;
    const ProblemConfig c = ndr::parse_config(minimal_config());
    const auto q = ndr::discretize(c);
    const Eigen::Index n = static_cast<Eigen::Index>(q.size());
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd ru = Eigen::VectorXd::Zero(n);
    std::vector<char> mask(q.size(), 1), ex(q.size(), 0);
    const std::string path = (tmp.path / "states.csv").string();
    ndr::write_states_csv(path, q, u, nullptr, ru, nullptr, mask, ex);
    const ndr::StatesTable table = ndr::read_states_csv(path);
    CHECK_FALSE(table.v.has_value());
}

TEST_CASE("kernel dump header and payload") {
    TempDir tmp;
    Eigen::MatrixXd A(2, 2);
    A << 1.5, -2.0, -2.0, 4.25;
    const std::string path = (tmp.path / "kernel.bin").string();
    ndr::write_kernel_dump(path, A, ndr::KernelFamily::Kdv);
    std::ifstream in(path, std::ios::binary);
    std::uint64_t n = 0, tag = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&tag), 8);
    CHECK(n == 2);
    CHECK(tag == 2);
    double vals[4];
    in.read(reinterpret_cast<char*>(vals), 32);
    CHECK(vals[0] == 1.5);
    CHECK(vals[1] == -2.0);
    CHECK(vals[3] == 4.25);
    CHECK(std::filesystem::file_size(path) == 16 + 4 * 8);
}

TEST_CASE("convergence csv") {
    TempDir tmp;
    const std::string path = (tmp.path / "convergence.csv").string();
    ndr::write_convergence_csv(path, {{100, 0.5, 0.0}, {200, 0.25, 1.0}});
    std::ifstream in(path);
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header == "n,error,observed_order");
    CHECK(row1 == "100,0.5,0");
    CHECK(row2 == "200,0.25,1");
}

TEST_CASE("support length and node-count discretization") {
    const ProblemConfig c = ndr::parse_config(minimal_config());
    CHECK(ndr::support_length(c.support) == doctest::Approx(0.9));
    const auto q = ndr::discretize_with_nodes(c.support, 180);
    CHECK(static_cast<int>(q.size()) == 180);
}
