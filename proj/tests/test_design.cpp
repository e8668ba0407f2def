#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "udnet/design.hpp"
#include "udnet/errors.hpp"

using namespace udnet;
using cd = std::complex<double>;

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix tensor_power(const CMatrix& u, int t) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int i = 0; i < t; ++i) out = kron(out, u);
    return out;
}

// U^{(x)t} (x) conj(U)^{(x)t}
CMatrix moment_of(const CMatrix& u, int t) { return kron(tensor_power(u, t), tensor_power(u.conjugate(), t)); }

// Row-major vectorization of the operator permuting t tensor factors of C^d.
Eigen::VectorXcd vec_permutation(int d, const std::vector<int>& perm) {
    const int t = static_cast<int>(perm.size());
    const long D = std::lround(std::pow(d, t));
    CMatrix p = CMatrix::Zero(D, D);
    std::vector<int> digits(t), out(t);
    for (long idx = 0; idx < D; ++idx) {
        long r = idx;
        for (int k = t - 1; k >= 0; --k) {
            digits[k] = static_cast<int>(r % d);
            r /= d;
        }
        for (int k = 0; k < t; ++k) out[perm[k]] = digits[k];
        long o = 0;
        for (int k = 0; k < t; ++k) o = o * d + out[k];
        p(o, idx) = 1.0;
    }
    Eigen::VectorXcd v(D * D);
    for (long i = 0; i < D; ++i)
        for (long j = 0; j < D; ++j) v(i * D + j) = p(i, j);
    return v;
}

std::vector<std::vector<int>> all_permutations(int t) {
    std::vector<int> p(t);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

double opnorm(const CMatrix& m) { return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0); }

std::vector<CMatrix> haar_gates(int d, int n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<CMatrix> out;
    for (int i = 0; i < n; ++i) out.push_back(sample_haar_su(d, rng));
    return out;
}

}  // namespace

TEST_CASE("Haar projector is the projector onto permutation operators") {
    for (auto [d, t] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}}) {
        const auto p = haar_moment_projector(d, t).matrix;
        CHECK(opnorm(p * p - p) <= 1e-10);
        CHECK(opnorm(p - p.adjoint()) <= 1e-10);
        const auto perms = all_permutations(t);
        CMatrix span(p.rows(), static_cast<Eigen::Index>(perms.size()));
        for (std::size_t k = 0; k < perms.size(); ++k) {
            const auto v = vec_permutation(d, perms[k]);
            span.col(static_cast<Eigen::Index>(k)) = v;
            CHECK((p * v - v).norm() <= 1e-10);
        }
        Eigen::FullPivLU<CMatrix> lu(span);
        lu.setThreshold(1e-9);
        CHECK(std::abs(p.trace().real() - lu.rank()) <= 1e-9);
        if (d >= t) CHECK(lu.rank() == static_cast<long>(perms.size()));
    }
    CHECK(std::abs(haar_moment_projector(2, 3).matrix.trace().real() - 5.0) < 1e-9);
    CHECK(std::abs(haar_moment_projector(2, 2).matrix.trace().real() - 2.0) < 1e-9);
    const auto p1 = haar_moment_projector(2, 1).matrix;
    Eigen::VectorXcd id(4);
    id << 1, 0, 0, 1;
    CHECK(opnorm(p1 - id * id.adjoint() / 2.0) <= 1e-12);
}

TEST_CASE("measure moments against explicit Kronecker products") {
    const auto gates = haar_gates(2, 5, 1);
    const auto nu = WeightedGateSet::uniform(2, gates);
    for (int t : {1, 2}) {
        CMatrix want = CMatrix::Zero(1 << (2 * t), 1 << (2 * t));
        for (const auto& g : gates) want += moment_of(g, t) / 5.0;
        CHECK(opnorm(measure_moment(nu, t).matrix - want) <= 1e-12);
        CHECK(measure_moment(nu, t).matrix == reference::measure_moment_serial(nu, t).matrix);
    }
    const auto one = WeightedGateSet::uniform(3, {CMatrix::Identity(3, 3)});
    CHECK(opnorm(measure_moment(one, 2).matrix - CMatrix::Identity(81, 81)) == 0.0);
    const auto pm = WeightedGateSet::uniform(2, {CMatrix::Identity(2, 2), -CMatrix::Identity(2, 2)});
    CHECK(opnorm(measure_moment(pm, 3).matrix - CMatrix::Identity(64, 64)) <= 1e-14);
    const auto pauli = WeightedGateSet::uniform(2, pauli_gates());
    CHECK(opnorm(measure_moment(pauli, 1).matrix - haar_moment_projector(2, 1).matrix) <= 1e-12);
    CHECK(opnorm(measure_moment(pauli, 2).matrix) <= 1 + 1e-12);
}

TEST_CASE("design error ground truths") {
    const auto pauli = WeightedGateSet::uniform(2, pauli_gates());
    CHECK(delta_design(pauli, 1) <= 1e-10);
    CHECK(delta_design(pauli, 2) > 1e-3);
    const auto id = WeightedGateSet::uniform(2, {CMatrix::Identity(2, 2)});
    CHECK(delta_design(id, 1) == doctest::Approx(1.0).epsilon(1e-10));
    const auto cliff = clifford24_gates();
    REQUIRE(cliff.size() == 24);
    const auto c = WeightedGateSet::uniform(2, cliff);
    for (int t = 1; t <= 3; ++t) CHECK(delta_design(c, t) <= 1e-9);
    CHECK(delta_design(c, 4) > 1e-3);
}

TEST_CASE("Clifford elements are distinct modulo phase") {
    const auto cliff = clifford24_gates();
    for (std::size_t i = 0; i < cliff.size(); ++i) {
        CHECK(unitarity_defect(cliff[i]) < 1e-12);
        for (std::size_t j = i + 1; j < cliff.size(); ++j)
            CHECK(std::abs(std::abs((cliff[i].adjoint() * cliff[j]).trace()) - 2.0) > 1e-6);
    }
}

TEST_CASE("empirical Haar moments approach the projector") {
    double prev = 2.0;
    for (int n : {1000, 10000}) {
        const auto nu = WeightedGateSet::uniform(2, haar_gates(2, n, 7 + n));
        const double dl = delta_design(nu, 2);
        CHECK(dl * std::sqrt(n) <= 5.0);
        CHECK(dl < prev);
        prev = dl;
    }
}

TEST_CASE("design error properties") {
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        const auto gates = haar_gates(2, 6, seed);
        const auto nu = WeightedGateSet::uniform(2, gates);
        double prev = 0;
        for (int t = 1; t <= 4; ++t) {
            const double v = delta_design(nu, t);
            CHECK(v >= prev - 1e-10);
            CHECK(v <= 1 + 1e-10);
            prev = v;
            CHECK(std::abs(v - delta_design_dense(nu, t)) <= 1e-9);
        }
        auto flipped = gates;
        for (std::size_t i = 0; i < flipped.size(); i += 2) flipped[i] *= -1.0;
        for (int t = 1; t <= 3; ++t)
            CHECK(std::abs(delta_design(WeightedGateSet::uniform(2, flipped), t) - delta_design(nu, t)) <= 1e-12);
    }
    const auto g3 = haar_gates(3, 4, 9);
    auto rot = g3;
    rot[1] *= std::polar(1.0, 2 * std::numbers::pi / 3);
    const auto a = WeightedGateSet::uniform(3, g3), b = WeightedGateSet::uniform(3, rot);
    for (int t = 1; t <= 2; ++t) {
        CHECK(std::abs(delta_design(a, t) - delta_design(b, t)) <= 1e-12);
        CHECK(std::abs(delta_design(a, t) - delta_design_dense(a, t)) <= 1e-9);
    }
    const auto cliff = WeightedGateSet::uniform(2, clifford24_gates());
    for (int t = 3; t >= 1; --t) CHECK(delta_design(cliff, t) <= 1e-9);
}

TEST_CASE("dimension cap") {
    CHECK(moment_dimension(2, 5) == 1024);
    CHECK(moment_dimension(3, 3) == 729);
    CHECK_THROWS_AS(moment_dimension(2, 7), ResourceLimit);
    CHECK_THROWS_AS(haar_moment_projector(3, 4), ResourceLimit);
    CHECK_THROWS_AS(delta_design(WeightedGateSet::uniform(2, pauli_gates()), 3, 32), ResourceLimit);
    CHECK(moment_dimension(2, 7, 1 << 14) == 1 << 14);
}

TEST_CASE("gate-set JSON") {
    const auto nu = WeightedGateSet::uniform(2, clifford24_gates());
    const auto path = (std::filesystem::temp_directory_path() / "udnet_test_gates.json").string();
    nu.save(path);
    const auto back = WeightedGateSet::load(path);
    std::filesystem::remove(path);
    REQUIRE(back.size() == 24);
    for (std::size_t i = 0; i < 24; ++i) {
        CHECK(back.elements()[i].weight == nu.elements()[i].weight);
        CHECK(back.elements()[i].matrix == nu.elements()[i].matrix);
    }
    using nlohmann::json;
    const json ok = json::parse(R"({"d": 2, "elements": [{"weight": 1.0, "matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}]})");
    CHECK(WeightedGateSet::from_json(ok).size() == 1);
    auto bad = ok;
    bad["elements"] = json::array();
    CHECK_THROWS_AS(WeightedGateSet::from_json(bad), InvalidInput);
    bad = ok;
    bad["extra"] = 1;
    CHECK_THROWS_AS(WeightedGateSet::from_json(bad), InvalidInput);
    bad = ok;
    bad["elements"][0]["weight"] = 0.5;
    CHECK_THROWS_AS(WeightedGateSet::from_json(bad), InvalidInput);
    bad = ok;
    bad["elements"][0]["matrix"][0][0] = json::array({2, 0});
    CHECK_THROWS_AS(WeightedGateSet::from_json(bad), InvalidInput);
    bad = ok;
    bad["elements"][0]["matrix"][0][0] = "one";
    CHECK_THROWS_AS(WeightedGateSet::from_json(bad), InvalidInput);
    bad = ok;
    bad["d"] = 3;
    CHECK_THROWS_AS(WeightedGateSet::from_json(bad), InvalidInput);
    CHECK_THROWS_AS(WeightedGateSet::load("/nonexistent/gates.json"), InvalidInput);
}

TEST_CASE("net probe") {
    const std::vector<CMatrix> id{CMatrix::Identity(2, 2)};
    const auto all = net_probe(id, 2.0, 5000, RngStream(1));
    CHECK(all.covered.mean == 1.0);
    CHECK(all.worst_distance == 0.0);
    const auto small = net_probe(id, 0.1, 20000, RngStream(1));
    CHECK(small.covered.mean < 0.01);
    CHECK(small.worst_distance > 1.0);
    const auto dense = net_probe(haar_gates(2, 10000, 2), 0.5, 100'000, RngStream(3));
    CHECK(dense.covered.mean == 1.0);
    CHECK_THROWS_AS(net_probe({}, 0.5, 10, RngStream(1)), InvalidInput);
}
