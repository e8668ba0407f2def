#include "udnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "udnet/bounds.hpp"
#include "udnet/errors.hpp"
#include "udnet/logmath.hpp"

namespace udnet {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
}

RngStream RngStream::substream(std::uint64_t index) const {
    return RngStream(seed_, splitmix(stream_id_ * 0x100000001b3ULL + index + 1));
}

double RngStream::uniform() { return std::generate_canonical<double, 53>(engine_); }

double RngStream::normal() { return normal_(engine_); }

CMatrix sample_haar_su(int d, RngStream& rng) {
    require_dimension(d);
    CMatrix z(d, d);
    const double s = std::sqrt(0.5);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const double re = rng.normal(), im = rng.normal();
            z(i, j) = {s * re, s * im};
        }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix& r = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        const std::complex<double> rjj = r(j, j);
        const double a = std::abs(rjj);
        if (a > 0) q.col(j) *= rjj / a;
    }
    const std::complex<double> det = q.determinant();
    q *= std::polar(1.0, -std::arg(det) / d);
    return q;
}

CMatrix sample_gue_traceless(int d, RngStream& rng) {
    require_dimension(d);
    CMatrix a(d, d);
    const double sd = std::sqrt(0.5);
    for (int i = 0; i < d; ++i) {
        a(i, i) = sd * rng.normal();
        for (int j = i + 1; j < d; ++j) {
            const double re = 0.5 * rng.normal(), im = 0.5 * rng.normal();
            a(i, j) = {re, im};
            a(j, i) = {re, -im};
        }
    }
    const std::complex<double> tr = a.trace() / static_cast<double>(d);
    for (int i = 0; i < d; ++i) a(i, i) -= tr;
    return a;
}

std::vector<double> unitary_eigenphases(const CMatrix& u) {
    const int d = static_cast<int>(u.rows());
    std::vector<double> th(d);
    if (d == 2 && std::abs(u.determinant() - 1.0) < 1e-8) {
        // SU(2): eigenvalues exp(+-i theta) with 2 cos theta = tr U
        const double c = std::clamp(u.trace().real() / 2.0, -1.0, 1.0);
        th[0] = std::acos(c);
        th[1] = -th[0];
        return th;
    }
    Eigen::ComplexEigenSolver<CMatrix> es(u, false);
    for (int i = 0; i < d; ++i) th[i] = std::arg(es.eigenvalues()[i]);
    return th;
}

TorusPoint torus_point_of(const CMatrix& u) {
    const auto th = unitary_eigenphases(u);
    return TorusPoint::from_eigenphases(th);
}

double unitarity_defect(const CMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    const CMatrix e = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
    return e.cwiseAbs().maxCoeff();
}

double projective_distance_to_identity(const std::vector<double>& th) {
    const int d = static_cast<int>(th.size());
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < d; ++r) {
        double worst = 0.0;
        for (double t : th) worst = std::max(worst, 2.0 * std::abs(std::sin((t - 2 * kPi * r / d) / 2)));
        best = std::min(best, worst);
    }
    return best;
}

double su_distance_to_identity(const std::vector<double>& th) {
    double worst = 0.0;
    for (double t : th) worst = std::max(worst, 2.0 * std::abs(std::sin(t / 2)));
    return worst;
}

double projective_distance(const CMatrix& u, const CMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols()) throw InvalidInput("matrices have different shapes");
    if (unitarity_defect(u) > 1e-8 || unitarity_defect(v) > 1e-8)
        throw InvalidInput("projective_distance needs unitary inputs (defect above 1e-8)");
    CMatrix w = v.adjoint() * u;
    // any branch of det^{1/d} works, the minimum runs over the d-th roots anyway
    w *= std::polar(1.0, -std::arg(w.determinant()) / static_cast<double>(w.rows()));
    Eigen::ComplexEigenSolver<CMatrix> es(w, false);
    std::vector<double> th(w.rows());
    for (int i = 0; i < w.rows(); ++i) th[i] = std::arg(es.eigenvalues()[i]);
    return projective_distance_to_identity(th);
}

namespace {

struct ChunkStats {
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
};

// Chan et al. pairwise merge.
void merge(ChunkStats& a, const ChunkStats& b) {
    if (b.n == 0) return;
    if (a.n == 0) {
        a = b;
        return;
    }
    const double n = static_cast<double>(a.n + b.n);
    const double delta = b.mean - a.mean;
    a.mean += delta * static_cast<double>(b.n) / n;
    a.m2 += b.m2 + delta * delta * static_cast<double>(a.n) * static_cast<double>(b.n) / n;
    a.n += b.n;
}

template <class Sample>
McEstimate run_chunks(std::size_t n, const RngStream& rng, bool parallel, Sample&& sample) {
    if (n == 0) throw InvalidParameter("sample count must be >= 1");
    const std::size_t chunks = (n + kMcChunk - 1) / kMcChunk;
    std::vector<ChunkStats> st(chunks);
    auto body = [&](std::size_t c) {
        RngStream s = rng.substream(c);
        const std::size_t cnt = std::min(kMcChunk, n - c * kMcChunk);
        // shifted Kahan sums; the shift is the chunk's first draw
        double shift = 0.0;
        KahanSum s1, s2;
        for (std::size_t i = 0; i < cnt; ++i) {
            const double x = sample(s);
            if (i == 0) shift = x;
            const double y = x - shift;
            s1.add(y);
            s2.add(y * y);
        }
        const double nn = static_cast<double>(cnt);
        st[c].mean = shift + s1.value() / nn;
        st[c].m2 = std::max(0.0, s2.value() - s1.value() * s1.value() / nn);
        st[c].n = cnt;
    };
    if (parallel) {
        const long nc = static_cast<long>(chunks);
#pragma omp parallel for schedule(dynamic)
        for (long c = 0; c < nc; ++c) body(static_cast<std::size_t>(c));
    } else {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
    }
    ChunkStats tot;
    for (const auto& c : st) merge(tot, c);
    McEstimate e;
    e.mean = tot.mean;
    e.n = tot.n;
    e.std_error = tot.n > 1 ? std::sqrt(tot.m2 / static_cast<double>(tot.n - 1) / static_cast<double>(tot.n)) : 0.0;
    return e;
}

double hermitian_norm(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

McEstimate gue_tail_impl(int d, double r, std::size_t n, const RngStream& rng, bool parallel) {
    require_dimension(d);
    return run_chunks(n, rng, parallel, [&](RngStream& s) {
        const CMatrix a = sample_gue_traceless(d, s);
        return hermitian_norm(a) >= r ? 1.0 : 0.0;
    });
}

int default_trim(int d, double sigma) { return static_cast<int>(std::ceil(t_star(d, sigma))); }

McEstimate outside_ball_impl(int d, double sigma, std::optional<int> trim_t, double eps, std::size_t n,
                             const RngStream& rng, bool parallel) {
    if (!(eps > 0.0 && eps <= 2.0)) throw InvalidParameter("eps must lie in (0, 2]");
    KernelParams p;
    p.d = d;
    p.sigma = sigma;
    p.trim_t = trim_t ? *trim_t : default_trim(d, sigma);
    const auto e = CharacterExpansion::pu_heat(p);
    return run_chunks(n, rng, parallel, [&](RngStream& s) {
        const CMatrix u = sample_haar_su(d, s);
        const auto th = unitary_eigenphases(u);
        if (projective_distance_to_identity(th) <= eps) return 0.0;
        return std::abs(e.evaluate(TorusPoint::from_eigenphases(th)).value);
    });
}

}  // namespace

McEstimate gue_tail_mc(int d, double r, std::size_t n, const RngStream& rng) {
    return gue_tail_impl(d, r, n, rng, true);
}

McEstimate mc_haar_average(int d, std::size_t n, const RngStream& rng, const std::function<double(const CMatrix&)>& f) {
    require_dimension(d);
    return run_chunks(n, rng, true, [&](RngStream& s) { return f(sample_haar_su(d, s)); });
}

McEstimate mc_normalization(int d, double sigma, std::optional<int> trim_t, std::size_t n, const RngStream& rng) {
    KernelParams p;
    p.d = d;
    p.sigma = sigma;
    p.trim_t = trim_t;
    const auto e = CharacterExpansion::pu_heat(p);
    return run_chunks(n, rng, true, [&](RngStream& s) {
        const CMatrix u = sample_haar_su(d, s);
        return e.evaluate(TorusPoint::from_eigenphases(unitary_eigenphases(u))).value;
    });
}

McEstimate mc_outside_ball(int d, double sigma, std::optional<int> trim_t, double eps, std::size_t n,
                           const RngStream& rng) {
    return outside_ball_impl(d, sigma, trim_t, eps, n, rng, true);
}

McEstimate mc_pu_outside_projective_ball(int d, double sigma, double eps, std::size_t n, const RngStream& rng) {
    KernelParams p;
    p.d = d;
    p.sigma = sigma;
    const auto e = CharacterExpansion::pu_heat(p);
    return run_chunks(n, rng, true, [&](RngStream& s) {
        const auto th = unitary_eigenphases(sample_haar_su(d, s));
        if (projective_distance_to_identity(th) <= eps) return 0.0;
        return e.evaluate(TorusPoint::from_eigenphases(th)).value;
    });
}

McEstimate mc_su_outside_ball(int d, double sigma, double eps, std::size_t n, const RngStream& rng) {
    KernelParams p;
    p.d = d;
    p.sigma = sigma;
    const auto e = CharacterExpansion::su_heat(p);
    return run_chunks(n, rng, true, [&](RngStream& s) {
        const auto th = unitary_eigenphases(sample_haar_su(d, s));
        if (su_distance_to_identity(th) <= eps) return 0.0;
        return e.evaluate(TorusPoint::from_eigenphases(th)).value;
    });
}

namespace {

void check_quadrature_dim(int d, int grid_n) {
    require_dimension(d);
    if (d > 3) throw UnsupportedDimension("torus quadrature supports d in {2, 3}; use Monte Carlo for d >= 4");
    if (grid_n < 1) throw InvalidParameter("grid_n must be >= 1");
}

template <class T, class F>
T quadrature_impl(int d, int n, const F& f, bool parallel) {
    check_quadrature_dim(d, n);
    const double w0 = 1.0 / std::tgamma(d + 1.0) / std::pow(static_cast<double>(n), d - 1);
    const double h = 2 * kPi / n;
    std::vector<T> rows(n, T{});
    auto row = [&](int i) {
        KahanSum re, im;
        std::vector<double> phi(d - 1);
        phi[0] = -kPi + h * i;
        const int inner = d == 3 ? n : 1;
        for (int k = 0; k < inner; ++k) {
            if (d == 3) phi[1] = -kPi + h * k;
            TorusPoint x(d, phi);
            const double jr = j_real(x);
            const double w = jr * jr * w0;
            if (w == 0.0) continue;
            const T v = f(x);
            if constexpr (std::is_same_v<T, double>) {
                re.add(w * v);
            } else {
                re.add(w * v.real());
                im.add(w * v.imag());
            }
        }
        if constexpr (std::is_same_v<T, double>)
            rows[i] = re.value();
        else
            rows[i] = T(re.value(), im.value());
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) row(i);
    } else {
        for (int i = 0; i < n; ++i) row(i);
    }
    KahanSum re, im;
    for (const auto& v : rows) {
        if constexpr (std::is_same_v<T, double>) {
            re.add(v);
        } else {
            re.add(v.real());
            im.add(v.imag());
        }
    }
    if constexpr (std::is_same_v<T, double>)
        return re.value();
    else
        return T(re.value(), im.value());
}

}  // namespace

double torus_quadrature(int d, int grid_n, const std::function<double(const TorusPoint&)>& f) {
    return quadrature_impl<double>(d, grid_n, f, true);
}

std::complex<double> torus_quadrature_complex(int d, int grid_n,
                                              const std::function<std::complex<double>(const TorusPoint&)>& f) {
    return quadrature_impl<std::complex<double>>(d, grid_n, f, true);
}

double numeric_I0_log(int d, double sigma, double eps, int grid_n) {
    check_quadrature_dim(d, grid_n);
    if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
    const double et = eps_tilde(eps);
    const int n = grid_n;
    const double h = 2 * kPi / n;
    const double log_w = log_prefactor(d, sigma) - (d - 1) * std::log(static_cast<double>(n));
    std::vector<double> rows(n, kNegInf);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        SignedLogSum acc;
        std::vector<double> phi(d - 1);
        phi[0] = -kPi + h * (i + 0.5);
        const int inner = d == 3 ? n : 1;
        for (int k = 0; k < inner; ++k) {
            if (d == 3) phi[1] = -kPi + h * (k + 0.5);
            double mx = 0.0;
            for (double a : phi) mx = std::max(mx, std::abs(a));
            if (mx <= et) continue;
            std::vector<double> th(phi);
            double s = 0.0, sq = 0.0;
            for (double a : phi) {
                s += a;
                sq += a * a;
            }
            th.push_back(-s);
            double lj = 0.0, lp = 0.0;
            bool zero = false;
            for (int a = 0; a < d && !zero; ++a)
                for (int b = a + 1; b < d; ++b) {
                    const double diff = th[a] - th[b];
                    const double sn = std::abs(2.0 * std::sin(diff / 2));
                    if (diff == 0.0 || sn == 0.0) {
                        zero = true;
                        break;
                    }
                    lj += std::log(sn);
                    lp += std::log(std::abs(diff));
                }
            if (zero) continue;
            acc.add(1, lj + lp - 2.0 * d * (sq + s * s) / (4.0 * sigma));
        }
        rows[i] = acc.log_abs();
    }
    SignedLogSum tot;
    for (double r : rows) tot.add(1, r);
    return log_w + tot.log_abs();
}

double numeric_I0(int d, double sigma, double eps, int grid_n) {
    return std::exp(numeric_I0_log(d, sigma, eps, grid_n));
}

double gue0_probability_d2(double r) {
    if (!(r >= 0.0)) throw InvalidParameter("r must be non-negative");
    // normalisation (1/(1! 2!)) (2 pi)^{-1/2} 2^{3/2}; hyperplane point (y, -y)
    // has intrinsic line element sqrt(2) dy
    const double k = 0.5 * std::pow(2 * kPi, -0.5) * std::pow(2.0, 1.5) * std::sqrt(2.0);
    auto f = [](double y) { return std::exp(-2.0 * y * y) * 4.0 * y * y; };
    double err = 0.0;
    const double lim = std::isinf(r) ? std::numeric_limits<double>::infinity() : r;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -lim, lim, 20, 1e-14, &err);
    return k * v;
}

namespace reference {

double torus_quadrature_serial(int d, int grid_n, const std::function<double(const TorusPoint&)>& f) {
    return quadrature_impl<double>(d, grid_n, f, false);
}

McEstimate gue_tail_mc_serial(int d, double r, std::size_t n, const RngStream& rng) {
    return gue_tail_impl(d, r, n, rng, false);
}

McEstimate mc_outside_ball_serial(int d, double sigma, std::optional<int> trim_t, double eps, std::size_t n,
                                  const RngStream& rng) {
    return outside_ball_impl(d, sigma, trim_t, eps, n, rng, false);
}

}  // namespace reference

}  // namespace udnet
