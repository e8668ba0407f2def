#include "udnet/design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <Eigen/SVD>

#include "udnet/errors.hpp"
#include "udnet/logmath.hpp"

namespace udnet {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kWeightTol = 1e-12;

using cd = std::complex<double>;

}  // namespace

WeightedGateSet::WeightedGateSet(int d, std::vector<WeightedGate> elements) : d_(d), elements_(std::move(elements)) {
    require_dimension(d);
    if (elements_.empty()) throw InvalidInput("gate set has no elements");
    double total = 0.0;
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        const auto& g = elements_[i];
        if (!(g.weight > 0.0) || !std::isfinite(g.weight))
            throw InvalidInput("element " + std::to_string(i) + ": weight must be positive");
        if (g.matrix.rows() != d || g.matrix.cols() != d)
            throw InvalidInput("element " + std::to_string(i) + ": matrix is not " + std::to_string(d) + "x" +
                               std::to_string(d));
        if (!g.matrix.allFinite()) throw InvalidInput("element " + std::to_string(i) + ": non-finite entry");
        if (unitarity_defect(g.matrix) > kUnitaryTol)
            throw InvalidInput("element " + std::to_string(i) + ": matrix is not unitary to 1e-10");
        total += g.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol) throw InvalidInput("weights sum to " + std::to_string(total) + ", not 1");
}

WeightedGateSet WeightedGateSet::uniform(int d, const std::vector<CMatrix>& gates) {
    std::vector<WeightedGate> el;
    for (const auto& g : gates) el.push_back({1.0 / static_cast<double>(gates.size()), g});
    return WeightedGateSet(d, std::move(el));
}

WeightedGateSet WeightedGateSet::from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw InvalidInput("gate set JSON must be an object");
        for (const auto& [k, v] : j.items())
            if (k != "d" && k != "elements") throw InvalidInput("unknown gate set key '" + k + "'");
        const int d = j.at("d").get<int>();
        require_dimension(d);
        std::vector<WeightedGate> el;
        for (const auto& e : j.at("elements")) {
            WeightedGate g;
            g.weight = e.at("weight").get<double>();
            const auto& rows = e.at("matrix");
            if (!rows.is_array() || static_cast<int>(rows.size()) != d)
                throw InvalidInput("matrix must have " + std::to_string(d) + " rows");
            g.matrix.resize(d, d);
            for (int r = 0; r < d; ++r) {
                const auto& row = rows[r];
                if (!row.is_array() || static_cast<int>(row.size()) != d)
                    throw InvalidInput("matrix row must have " + std::to_string(d) + " entries");
                for (int c = 0; c < d; ++c) {
                    const auto& z = row[c];
                    if (!z.is_array() || z.size() != 2) throw InvalidInput("matrix entries are [re, im] pairs");
                    g.matrix(r, c) = cd(z[0].get<double>(), z[1].get<double>());
                }
            }
            el.push_back(std::move(g));
        }
        return WeightedGateSet(d, std::move(el));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed gate set JSON: ") + e.what());
    }
}

WeightedGateSet WeightedGateSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open gate set file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed gate set JSON: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json WeightedGateSet::to_json() const {
    nlohmann::json els = nlohmann::json::array();
    for (const auto& g : elements_) {
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < d_; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < d_; ++c) row.push_back({g.matrix(r, c).real(), g.matrix(r, c).imag()});
            rows.push_back(row);
        }
        els.push_back({{"weight", g.weight}, {"matrix", rows}});
    }
    return {{"d", d_}, {"elements", els}};
}

void WeightedGateSet::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << to_json().dump(2) << '\n';
}

std::size_t moment_dimension(int d, int t, std::size_t cap) {
    require_dimension(d);
    if (t < 1) throw InvalidParameter("t must be >= 1");
    double dim = std::pow(static_cast<double>(d), 2.0 * t);
    if (dim > static_cast<double>(cap))
        throw ResourceLimit("moment operator dimension " + std::to_string(static_cast<long double>(dim)) +
                            " exceeds cap " + std::to_string(cap));
    return static_cast<std::size_t>(dim);
}

namespace {

long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

CMatrix tensor_power(const CMatrix& u, int t) {
    CMatrix out = CMatrix::Ones(1, 1);
    for (int k = 0; k < t; ++k) {
        CMatrix next(out.rows() * u.rows(), out.cols() * u.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                next.block(i * u.rows(), j * u.cols(), u.rows(), u.cols()) = out(i, j) * u;
        out = std::move(next);
    }
    return out;
}

int cycle_count(const std::vector<int>& p) {
    std::vector<char> seen(p.size(), 0);
    int c = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i]) continue;
        ++c;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(p[j])) seen[j] = 1;
    }
    return c;
}

// Low-rank form P = V G^+ V^dagger of the Haar projector.
struct HaarProjector {
    Eigen::MatrixXd v;      // D x t!, vectorized permutation operators
    Eigen::MatrixXd g_pinv;  // t! x t!
};

HaarProjector build_projector(int d, int t) {
    std::vector<std::vector<int>> perms;
    std::vector<int> p(t);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    const long n = ipow(d, t);
    const auto np = static_cast<Eigen::Index>(perms.size());
    HaarProjector hp;
    hp.v = Eigen::MatrixXd::Zero(n * n, np);
    std::vector<int> digits(t), moved(t);
    for (Eigen::Index s = 0; s < np; ++s) {
        // P_s |i_1..i_t> = |i_{s(1)}..i_{s(t)}>; column index c, row index r
        for (long c = 0; c < n; ++c) {
            long x = c;
            for (int k = t - 1; k >= 0; --k) {
                digits[k] = static_cast<int>(x % d);
                x /= d;
            }
            long r = 0;
            for (int k = 0; k < t; ++k) r = r * d + digits[perms[s][k]];
            hp.v(r * n + c, s) = 1.0;
        }
    }
    Eigen::MatrixXd g(np, np);
    for (Eigen::Index a = 0; a < np; ++a)
        for (Eigen::Index b = 0; b < np; ++b) {
            // tr(P_a^T P_b) = d^{#cycles(a^{-1} b)}
            std::vector<int> inv(t), comp(t);
            for (int k = 0; k < t; ++k) inv[perms[a][k]] = k;
            for (int k = 0; k < t; ++k) comp[k] = inv[perms[b][k]];
            g(a, b) = std::pow(static_cast<double>(d), cycle_count(comp));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const auto& ev = es.eigenvalues();
    const double cutoff = 1e-10 * ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(np);
    for (Eigen::Index i = 0; i < np; ++i)
        if (ev[i] > cutoff) inv[i] = 1.0 / ev[i];
    hp.g_pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    return hp;
}

MomentOperator measure_moment_impl(const WeightedGateSet& nu, int t, std::size_t cap, bool parallel) {
    const auto dim = static_cast<Eigen::Index>(moment_dimension(nu.d(), t, cap));
    const Eigen::Index n = ipow(nu.d(), t);
    std::vector<CMatrix> powers;
    std::vector<double> w;
    for (const auto& g : nu.elements()) {
        powers.push_back(tensor_power(g.matrix, t));
        w.push_back(g.weight);
    }
    MomentOperator m{nu.d(), t, CMatrix::Zero(dim, dim)};
    // entry ((r1,r2),(c1,c2)) = sum_i w_i A_i(r1,c1) conj(A_i(r2,c2))
    auto row_block = [&](Eigen::Index r1) {
        for (std::size_t i = 0; i < powers.size(); ++i) {
            const CMatrix& a = powers[i];
            const CMatrix ac = a.conjugate();
            for (Eigen::Index c1 = 0; c1 < n; ++c1) {
                const cd f = w[i] * a(r1, c1);
                if (f == cd(0.0)) continue;
                m.matrix.block(r1 * n, c1 * n, n, n) += f * ac;
            }
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (Eigen::Index r1 = 0; r1 < n; ++r1) row_block(r1);
    } else {
        for (Eigen::Index r1 = 0; r1 < n; ++r1) row_block(r1);
    }
    return m;
}

}  // namespace

MomentOperator haar_moment_projector(int d, int t, std::size_t cap) {
    moment_dimension(d, t, cap);
    const auto hp = build_projector(d, t);
    const Eigen::MatrixXd p = hp.v * hp.g_pinv * hp.v.transpose();
    return {d, t, p.cast<cd>()};
}

MomentOperator measure_moment(const WeightedGateSet& nu, int t, std::size_t cap) {
    return measure_moment_impl(nu, t, cap, true);
}

double delta_design_dense(const WeightedGateSet& nu, int t, std::size_t cap) {
    const auto tm = measure_moment(nu, t, cap);
    const auto p = haar_moment_projector(nu.d(), t, cap);
    Eigen::BDCSVD<CMatrix> svd(tm.matrix - p.matrix);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double delta_design(const WeightedGateSet& nu, int t, std::size_t cap, std::uint64_t seed) {
    moment_dimension(nu.d(), t, cap);
    const Eigen::Index n = ipow(nu.d(), t);
    const auto hp = build_projector(nu.d(), t);
    std::vector<CMatrix> powers;
    std::vector<double> w;
    for (const auto& g : nu.elements()) {
        powers.push_back(tensor_power(g.matrix, t));
        w.push_back(g.weight);
    }
    // Matrix-free products: (A (x) conj A) vec(X) = vec(A X A^dagger) for row-major vec.
    auto as_mat = [n](const Eigen::VectorXcd& v) {
        return Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), n, n);
    };
    auto project = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        const Eigen::VectorXcd re = hp.v * (hp.g_pinv * (hp.v.transpose() * v.real()));
        const Eigen::VectorXcd im = hp.v * (hp.g_pinv * (hp.v.transpose() * v.imag()));
        return re + cd(0, 1) * im;
    };
    auto apply = [&](const Eigen::VectorXcd& v, bool adjoint) -> Eigen::VectorXcd {
        Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> acc =
            Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(n, n);
        const auto x = as_mat(v);
        for (std::size_t i = 0; i < powers.size(); ++i) {
            if (adjoint)
                acc.noalias() += w[i] * (powers[i].adjoint() * x * powers[i]);
            else
                acc.noalias() += w[i] * (powers[i] * x * powers[i].adjoint());
        }
        Eigen::VectorXcd out = Eigen::Map<const Eigen::VectorXcd>(acc.data(), n * n);
        return out - project(v);
    };

    RngStream rng(seed, 0x64656c7461ULL);
    double best = 0.0;
    for (int restart = 0; restart < 3; ++restart) {
        RngStream s = rng.substream(static_cast<std::uint64_t>(restart));
        Eigen::VectorXcd v(n * n);
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cd(s.normal(), s.normal());
        v.normalize();
        double prev = -1.0, sv = 0.0;
        int stall = 0;
        for (int it = 0; it < 20000; ++it) {
            const Eigen::VectorXcd dv = apply(v, false);
            sv = dv.norm();
            if (sv < 1e-300) break;
            Eigen::VectorXcd nv = apply(dv, true);
            const double nn = nv.norm();
            if (nn < 1e-300) break;
            v = nv / nn;
            if (std::abs(sv - prev) <= 1e-13) {
                if (++stall >= 3) break;
            } else {
                stall = 0;
            }
            prev = sv;
        }
        best = std::max(best, sv);
    }
    return best;
}

NetProbe net_probe(const std::vector<CMatrix>& support, double eps, std::size_t n, const RngStream& rng) {
    if (support.empty()) throw InvalidInput("net_probe needs a non-empty support");
    if (n == 0) throw InvalidParameter("n must be >= 1");
    const int d = static_cast<int>(support.front().rows());
    require_dimension(d);
    // move the support into SU(d); d_P only sees the coset
    std::vector<CMatrix> sup;
    for (const auto& u : support) {
        if (u.rows() != d || u.cols() != d) throw InvalidInput("support matrices have mixed shapes");
        const cd det = u.determinant();
        sup.push_back(u * std::polar(1.0, -std::arg(det) / d));
    }
    const std::size_t chunks = (n + kMcChunk - 1) / kMcChunk;
    std::vector<std::size_t> hits(chunks, 0);
    std::vector<double> worst(chunks, 0.0);
    const long nc = static_cast<long>(chunks);
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < nc; ++c) {
        RngStream s = rng.substream(static_cast<std::uint64_t>(c));
        const std::size_t cnt = std::min(kMcChunk, n - static_cast<std::size_t>(c) * kMcChunk);
        for (std::size_t i = 0; i < cnt; ++i) {
            const CMatrix u = sample_haar_su(d, s);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : sup) {
                double dist;
                if (d == 2) {
                    // V^dagger U in SU(2) has eigenphases +-a with cos a = Re tr / 2
                    const double re_tr = (v.adjoint() * u).trace().real();
                    const double a = std::acos(std::clamp(re_tr / 2.0, -1.0, 1.0));
                    dist = 2.0 * std::min(std::sin(a / 2), std::cos(a / 2));
                } else {
                    dist = projective_distance(u, v);
                }
                best = std::min(best, dist);
                if (best <= eps) break;
            }
            auto& slot = worst[static_cast<std::size_t>(c)];
            if (best <= eps)
                ++hits[static_cast<std::size_t>(c)];
            else
                slot = std::max(slot, best);
        }
    }
    std::size_t tot = 0;
    double w = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        tot += hits[c];
        w = std::max(w, worst[c]);
    }
    NetProbe r;
    const double p = static_cast<double>(tot) / static_cast<double>(n);
    r.covered.mean = p;
    r.covered.n = n;
    r.covered.std_error = n > 1 ? std::sqrt(p * (1 - p) / static_cast<double>(n - 1)) : 0.0;
    r.worst_distance = w;
    return r;
}

std::vector<CMatrix> pauli_gates() {
    CMatrix i = CMatrix::Identity(2, 2), x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, cd(0, -1), cd(0, 1), 0;
    z << 1, 0, 0, -1;
    return {i, x, y, z};
}

namespace {

// Global phase fixed so the first entry of largest modulus is real positive.
CMatrix canonical_phase(const CMatrix& u) {
    Eigen::Index bi = 0;
    double bm = -1.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        const double m = std::abs(u.data()[k]);
        if (m > bm + 1e-9) {
            bm = m;
            bi = k;
        }
    }
    const cd z = u.data()[bi];
    return u * (std::abs(z) / z);
}

std::vector<long> phase_key(const CMatrix& u) {
    std::vector<long> k;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        k.push_back(std::lround(u.data()[i].real() * 1e8));
        k.push_back(std::lround(u.data()[i].imag() * 1e8));
    }
    return k;
}

}  // namespace

std::vector<CMatrix> clifford24_gates() {
    const double r = 1.0 / std::sqrt(2.0);
    CMatrix h(2, 2), s(2, 2);
    h << r, r, r, -r;
    s << 1, 0, 0, cd(0, 1);
    std::map<std::vector<long>, CMatrix> seen;
    std::vector<CMatrix> queue{CMatrix::Identity(2, 2)};
    seen.emplace(phase_key(queue[0]), queue[0]);
    for (std::size_t q = 0; q < queue.size(); ++q) {
        for (const CMatrix* g : {&h, &s}) {
            const CMatrix next = canonical_phase(*g * queue[q]);
            if (seen.emplace(phase_key(next), next).second) queue.push_back(next);
        }
    }
    return queue;
}

namespace reference {
MomentOperator measure_moment_serial(const WeightedGateSet& nu, int t, std::size_t cap) {
    return measure_moment_impl(nu, t, cap, false);
}
}  // namespace reference

}  // namespace udnet
