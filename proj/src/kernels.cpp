#include "udnet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "udnet/errors.hpp"
#include "udnet/logmath.hpp"

namespace udnet {

void KernelParams::validate() const {
    require_dimension(d);
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be a positive finite number");
    if (trim_t && *trim_t < 0) throw InvalidParameter("trim_t must be non-negative");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw InvalidParameter("tail_tol must lie in (0, 1)");
    if (lattice_radius && *lattice_radius < 0) throw InvalidParameter("lattice_radius must be non-negative");
}

double log_su_width_term(int d, double sigma, long n) {
    const double m = d * (d - 1) / 2.0;
    const double nn = static_cast<double>(n);
    return (d - 2 + 2 * m) * std::log(nn + 1) - sigma * (nn * nn / (4.0 * d) + (d - 1) * nn / (2.0 * d));
}

double log_pu_shell_term(int d, double sigma, long j, double mult) {
    const double jj = static_cast<double>(j);
    return (d - 1) * std::log(1 + 2 * jj) + d * (d - 1.0) * std::log(1 + jj) -
           mult * sigma * (jj * jj / (2.0 * d * d) + jj / 4.0);
}

namespace {

constexpr long kMaxTailSteps = 50'000'000;

// Terms f(L+1), f(L+2), ... until the geometric remainder is negligible
// relative to what was summed and below `floor`. Returns the terms and the
// log remainder bound beyond the last one.
struct TailScan {
    std::vector<double> terms;
    double log_rest;
};

TailScan scan_tail(const std::function<double(long)>& f, long L, double floor) {
    TailScan out{{}, kNegInf};
    double s = kNegInf;
    double cur = f(L + 1);
    for (long n = L + 1;; ++n) {
        if (n - L > kMaxTailSteps) throw TruncationFailure("tail envelope did not converge", n);
        out.terms.push_back(cur);
        s = log_add(s, cur);
        const double next = f(n + 1);
        const double r = std::exp(next - cur);
        if (r < 1.0) {
            // log-concave terms: later ratios are no larger than r
            const double rest = next - std::log1p(-r);
            if (rest < s - 36.0 && rest < floor) {
                out.log_rest = rest;
                return out;
            }
        }
        cur = next;
    }
}

}  // namespace

double log_tail_sum(const std::function<double(long)>& f, long L) {
    auto sc = scan_tail(f, L, std::numeric_limits<double>::infinity());
    double s = sc.log_rest;
    for (double v : sc.terms) s = log_add(s, v);
    return s;
}

TailCut tail_cutoff(const std::function<double(long)>& f, double tol, long start) {
    const double lt = std::log(tol);
    auto sc = scan_tail(f, start, lt - 36.0);
    const long N = static_cast<long>(sc.terms.size());
    // suffix[i] = log sum of terms[i..] + rest; terms[i] is f(start + 1 + i)
    std::vector<double> suffix(N + 1);
    suffix[N] = sc.log_rest;
    for (long i = N - 1; i >= 0; --i) suffix[i] = log_add(sc.terms[i], suffix[i + 1]);
    for (long i = 0; i <= N; ++i)
        if (suffix[i] < lt) return {start + i, suffix[i]};
    return {start + N, suffix[N]};
}

CharacterExpansion::CharacterExpansion(int d, std::vector<int> labels, std::vector<double> coeffs, double bound)
    : d_(d), labels_(std::move(labels)), coeffs_(std::move(coeffs)), truncation_bound_(bound), scale_(0.0) {
    if (labels_.size() != coeffs_.size() * static_cast<std::size_t>(d))
        throw InvalidParameter("expansion labels and coefficients disagree");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) scale_ += std::abs(coeffs_[i]) * dim_real(label(i));
}

CharacterExpansion CharacterExpansion::su_heat(const KernelParams& p) {
    p.validate();
    if (p.trim_t) throw InvalidParameter("the SU(d) kernel is never trimmed; trim_t must be absent");
    const int d = p.d;
    const auto cut = tail_cutoff([&](long n) { return log_su_width_term(d, p.sigma, n); }, p.tail_tol);
    const long L = cut.cutoff;
    // number of labels with lambda_1 <= L is C(L + d - 1, d - 1)
    double count = 1.0;
    for (int i = 1; i <= d - 1; ++i) count = count * (L + i) / i;
    if (count > static_cast<double>(p.max_terms))
        throw TruncationFailure("SU(d) character sum needs width cutoff " + std::to_string(L) + " (" +
                                    std::to_string(static_cast<long long>(count)) + " terms), above max_terms",
                                L);
    std::vector<int> labels;
    std::vector<double> coeffs;
    for (long n = 0; n <= L; ++n)
        for_each_su_width(d, static_cast<int>(n), [&](const std::vector<int>& lam) {
            labels.insert(labels.end(), lam.begin(), lam.end());
            coeffs.push_back(std::exp(log_dim(lam) - p.sigma * casimir_real(lam)));
        });
    return CharacterExpansion(d, std::move(labels), std::move(coeffs), std::exp(cut.log_tail));
}

CharacterExpansion CharacterExpansion::pu_heat(const KernelParams& p) {
    p.validate();
    const int d = p.d;
    long shells;
    double bound = 0.0;
    const auto cut = tail_cutoff([&](long j) { return log_pu_shell_term(d, p.sigma, j, 1.0); }, p.tail_tol);
    shells = cut.cutoff / 2;
    bound = std::exp(cut.log_tail);
    if (p.trim_t && *p.trim_t <= shells) {
        // shells past the tail cutoff are below tail_tol, so a large trim only costs time
        shells = *p.trim_t;
        bound = 0.0;
    }
    std::vector<int> labels;
    std::vector<double> coeffs;
    for (long s = 0; s <= shells; ++s) {
        for_each_projective_shell(d, static_cast<int>(s), [&](const std::vector<int>& lam) {
            if (coeffs.size() >= p.max_terms)
                throw TruncationFailure("PU(d) character sum needs one-norm cutoff " + std::to_string(2 * shells) +
                                            ", above max_terms",
                                        2 * shells);
            labels.insert(labels.end(), lam.begin(), lam.end());
            coeffs.push_back(std::exp(log_dim(lam) - p.sigma * casimir_real(lam)));
        });
    }
    return CharacterExpansion(d, std::move(labels), std::move(coeffs), bound);
}

EvalResult CharacterExpansion::evaluate(const TorusPoint& x) const {
    if (x.d() != d_) throw InvalidParameter("torus point dimension mismatch");
    CharacterEvaluator ev(x);
    KahanSum re, im;
    const std::size_t n = coeffs_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> c = ev(label(i)) * coeffs_[i];
        re.add(c.real());
        im.add(c.imag());
    }
    const double floor = 1e-9 * std::max(1.0, std::abs(re.value())) +
                         (ev.confluent() ? 1e-7 : 1e-12) * scale_;
    if (!std::isfinite(re.value()) || std::abs(im.value()) > floor)
        throw NumericalInstability("character sum has imaginary residue " + std::to_string(im.value()));
    return {re.value(), truncation_bound_, n};
}

std::vector<EvalResult> CharacterExpansion::evaluate_many(std::span<const TorusPoint> xs) const {
    std::vector<EvalResult> out(xs.size());
    const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) out[i] = evaluate(xs[i]);
    return out;
}

std::vector<EvalResult> reference::evaluate_many_serial(const CharacterExpansion& e, std::span<const TorusPoint> xs) {
    std::vector<EvalResult> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(e.evaluate(x));
    return out;
}

EvalResult heat_su_char(const KernelParams& p, const TorusPoint& x) {
    if (x.d() != p.d) throw InvalidParameter("torus point dimension mismatch");
    return CharacterExpansion::su_heat(p).evaluate(x);
}

EvalResult heat_pu_char(const KernelParams& p, const TorusPoint& x) {
    if (x.d() != p.d) throw InvalidParameter("torus point dimension mismatch");
    return CharacterExpansion::pu_heat(p).evaluate(x);
}

namespace {

double log_shell_count(int d, long K) {
    // (2K+1)^{d-1} - (2K-1)^{d-1}
    const double a = 2.0 * K + 1, b = 2.0 * K - 1;
    return (d - 1) * std::log(a) + std::log1p(-std::pow(b / a, d - 1));
}

}  // namespace

EvalResult heat_su_poisson_direct(const KernelParams& p, const TorusPoint& x) {
    p.validate();
    const int d = p.d;
    if (x.d() != d) throw InvalidParameter("torus point dimension mismatch");
    const int m = d * (d - 1) / 2;
    const double sigma = p.sigma;
    const double jr = j_real(x);
    if (jr == 0.0 || !std::isfinite(jr)) throw NumericalInstability("Poisson form evaluated at a non-regular point");
    const double log_c = std::lgamma(d + 1.0) + log_prefactor(d, sigma);
    const double log_scale = log_c - std::log(std::abs(jr));

    auto shell_term = [&](long K) {
        return log_scale + log_shell_count(d, K) + m * std::log(kPi * d * (1.0 + 2.0 * K)) -
               d * kPi * kPi * (2.0 * K - 1) * (2.0 * K - 1) / (2.0 * sigma);
    };
    long K;
    double log_bound;
    if (p.lattice_radius) {
        K = *p.lattice_radius;
        log_bound = log_tail_sum(shell_term, K);
    } else {
        const auto cut = tail_cutoff(shell_term, p.tail_tol);
        K = cut.cutoff;
        log_bound = cut.log_tail;
    }
    const double cube = std::pow(2.0 * K + 1, d - 1);
    if (cube > static_cast<double>(p.max_terms))
        throw TruncationFailure("Poisson lattice radius " + std::to_string(K) + " exceeds max_terms", K);

    const auto& phi = x.phi();
    std::vector<long> k(d - 1, -K);
    std::vector<double> psi(d);
    SignedLogSum sum;
    std::size_t terms = 0;
    for (;;) {
        double tot = 0.0, sq = 0.0;
        for (int j = 0; j < d - 1; ++j) {
            psi[j] = phi[j] + 2 * kPi * static_cast<double>(k[j]);
            tot += psi[j];
            sq += psi[j] * psi[j];
        }
        psi[d - 1] = -tot;
        sq += tot * tot;
        int sign = 1;
        double lp = 0.0;
        for (int i = 0; i < d && sign != 0; ++i)
            for (int j = i + 1; j < d; ++j) {
                const double diff = psi[i] - psi[j];
                if (diff == 0.0) {
                    sign = 0;
                    break;
                }
                if (diff < 0) sign = -sign;
                lp += std::log(std::abs(diff));
            }
        sum.add(sign, lp - 2.0 * d * sq / (4.0 * sigma));
        ++terms;
        int pos = 0;
        while (pos < d - 1 && k[pos] == K) k[pos++] = -K;
        if (pos == d - 1) break;
        ++k[pos];
    }
    const int sign = sum.sign() * (jr > 0 ? 1 : -1);
    const double value = sign == 0 ? 0.0 : sign * std::exp(log_scale + sum.log_abs());
    const double bound = std::exp(log_bound);
    if (!std::isfinite(value)) throw NumericalInstability("Poisson lattice sum is not finite");
    return {value, bound, terms};
}

EvalResult heat_su_poisson(const KernelParams& p, const TorusPoint& x) {
    constexpr double kGap = 1e-6;
    constexpr double kStep = 1e-5;
    if (x.min_gap() >= kGap) return heat_su_poisson_direct(p, x);
    const int d = x.d();
    // candidate jitter directions; the first keeps all eigenphases apart
    for (int variant = 0; variant < 4; ++variant) {
        std::vector<double> v(d - 1);
        for (int j = 0; j < d - 1; ++j) {
            const double base = j + 1.0;
            v[j] = variant == 0 ? base : variant == 1 ? base * base : variant == 2 ? -base : base * (variant + 1);
        }
        std::vector<TorusPoint> pts;
        bool ok = true;
        for (double s : {1.0, -1.0, 2.0, -2.0}) {
            std::vector<double> q(x.phi());
            for (int j = 0; j < d - 1; ++j) q[j] += s * kStep * v[j];
            pts.emplace_back(d, std::move(q));
            if (pts.back().min_gap() < 0.25 * kStep) ok = false;
        }
        if (!ok) continue;
        EvalResult r[4];
        for (int i = 0; i < 4; ++i) r[i] = heat_su_poisson_direct(p, pts[i]);
        const double a1 = 0.5 * (r[0].value + r[1].value);
        const double a2 = 0.5 * (r[2].value + r[3].value);
        EvalResult out;
        out.value = (4.0 * a1 - a2) / 3.0;
        out.truncation_bound = (2.0 * (r[0].truncation_bound + r[1].truncation_bound) +
                                0.5 * (r[2].truncation_bound + r[3].truncation_bound)) /
                               3.0;
        out.terms_used = r[0].terms_used + r[1].terms_used + r[2].terms_used + r[3].terms_used;
        return out;
    }
    throw NumericalInstability("no jitter direction separates the eigenphases");
}

EvalResult heat_pu_poisson(const KernelParams& p, const TorusPoint& x) {
    const int d = x.d();
    EvalResult out;
    for (int r = 0; r < d; ++r) {
        const auto e = heat_su_poisson(p, x.center_shift(r));
        out.value += e.value;
        out.truncation_bound += e.truncation_bound;
        out.terms_used += e.terms_used;
    }
    out.value /= d;
    out.truncation_bound /= d;
    return out;
}

namespace {

LogEvalResult plancherel_shells(int d, double sigma, long first_shell, double tail_tol, std::size_t max_terms) {
    require_dimension(d);
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be a positive finite number");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw InvalidParameter("tail_tol must lie in (0, 1)");
    const double ltol = std::log(tail_tol);
    auto envelope = [&](long j) { return log_pu_shell_term(d, sigma, j, 2.0); };
    SignedLogSum sum;
    std::size_t terms = 0;
    for (long s = first_shell;; ++s) {
        for_each_projective_shell(d, static_cast<int>(s), [&](const std::vector<int>& lam) {
            if (++terms > max_terms)
                throw TruncationFailure("Plancherel sum exceeded max_terms at shell " + std::to_string(s), 2 * s);
            sum.add(1, 2.0 * log_dim(lam) - 2.0 * sigma * casimir_real(lam));
        });
        const double partial = sum.log_abs();
        // cheap pre-check on the next envelope term before the full tail
        if (envelope(2 * s + 2) > ltol + std::min(0.0, partial)) continue;
        const double rest = log_tail_sum(envelope, 2 * s);
        if (rest < ltol + std::min(0.0, partial)) return {partial, rest, terms};
    }
}

}  // namespace

LogEvalResult trimming_error_sq_log(int d, double sigma, int t, double tail_tol, std::size_t max_terms) {
    if (t < 0) throw InvalidParameter("t must be non-negative");
    return plancherel_shells(d, sigma, t + 1, tail_tol, max_terms);
}

EvalResult trimming_error(int d, double sigma, int t, double tail_tol) {
    const auto r = trimming_error_sq_log(d, sigma, t, tail_tol);
    const double v = std::exp(0.5 * r.log_value);
    const double b = v * std::expm1(0.5 * std::log1p(std::exp(r.log_truncation_bound - r.log_value)));
    return {v, b, r.terms_used};
}

double l2_norm_trimmed(int d, double sigma, int t) {
    require_dimension(d);
    if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
    if (t < 0) throw InvalidParameter("t must be non-negative");
    KahanSum s;
    for (int sh = 0; sh <= t; ++sh)
        for_each_projective_shell(d, sh, [&](const std::vector<int>& lam) {
            s.add(std::exp(2.0 * log_dim(lam) - 2.0 * sigma * casimir_real(lam)));
        });
    return std::sqrt(s.value());
}

EvalResult l2_norm_untrimmed(int d, double sigma, double tail_tol) {
    const auto r = plancherel_shells(d, sigma, 0, tail_tol, 50'000'000);
    const double v = std::exp(0.5 * r.log_value);
    const double b = v * std::expm1(0.5 * std::log1p(std::exp(r.log_truncation_bound - r.log_value)));
    return {v, b, r.terms_used};
}

}  // namespace udnet
