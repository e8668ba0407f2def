#include "udnet/bounds.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "udnet/errors.hpp"
#include "udnet/logmath.hpp"

namespace udnet {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be a positive finite number");
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 2.0)) throw InvalidParameter("eps must lie in (0, 2]");
}

void check_t(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameter("t must be non-negative");
}

double weyl_norm_sq(int d) { return (d * d - 1.0) / 24.0; }

int positive_roots(int d) { return d * (d - 1) / 2; }

Precondition leq(std::string name, std::string cond, double lhs, double rhs) {
    return {std::move(name), std::move(cond), lhs <= rhs, lhs, rhs};
}

void finish(BoundReport& r, double log_value) {
    if (r.preconditions_ok()) r.log_value = log_value;
}

}  // namespace

bool BoundReport::preconditions_ok() const {
    for (const auto& p : preconditions)
        if (!p.ok) return false;
    return true;
}

std::optional<double> BoundReport::value() const {
    if (!log_value) return std::nullopt;
    return std::exp(*log_value);
}

std::optional<std::string> BoundReport::violated() const {
    for (const auto& p : preconditions)
        if (!p.ok) return p.name;
    return std::nullopt;
}

namespace closed_form {

double log_trim(int d, double sigma, double t, double gamma) {
    return 0.5 * d * std::log(2.0) - 2.0 * sigma * (1.0 - gamma) * t * t / (1.0 * d * d) - 0.5 * sigma * t;
}

double log_I0_at_tilde(int d, double sigma, double et) {
    return std::log(0.5) - d * et * et / (16.0 * sigma) + weyl_norm_sq(d) * sigma;
}

double log_I0(int d, double sigma, double eps) { return log_I0_at_tilde(d, sigma, eps_tilde(eps)); }

double log_R(int d, double sigma) {
    const double m = positive_roots(d);
    const double ln2 = std::log(2.0);
    return log_prefactor(d, sigma) + m * ln2 + (d - 1) * ln2 + m * std::log(2 * kPi) + m * std::log(1.0 + d / 2.0) +
           (m + d - 1) * ln2 - d * kPi * kPi / (2.0 * sigma);
}

double log_outside_ball(int d, double sigma, double t, double eps, double eta) {
    const double a = 0.5 * d * std::log(2.0) - sigma * t * t / (1.0 * d * d) - 0.5 * sigma * t;
    const double b = std::log((1.0 + eta) / 2.0) - d * eps * eps / (16.0 * sigma) + weyl_norm_sq(d) * sigma;
    return log_add(a, b);
}

double log_I00(int d, double sigma) {
    const double m = positive_roots(d);
    const double l = d - 1;
    return 0.5 * (std::lgamma(d + 1.0) + log_prefactor(d, sigma) - (m + l / 2.0) * std::log(2.0) +
                  weyl_norm_sq(d) * sigma);
}

double log_L2(int d, double sigma, double eta) {
    const double m = positive_roots(d);
    const double first = std::log(static_cast<double>(d)) + log_I00(d, sigma);
    const double second = std::log(static_cast<double>(d)) + 0.5 * std::lgamma(d + 1.0) - (m - 1) * std::log(2.0) +
                          std::log(eta) + log_I0_at_tilde(d, sigma, kPi);
    return log_add(first, second);
}

double log_L2_simple(int d, double sigma) {
    const double c = d >= 12 ? 1.0 : 8.0;
    return std::log(c) + (d * d - 1.0) / 4.0 * std::log(d / sigma);
}

double log_L1_trimmed(int d, double sigma, double t) {
    return std::log1p(std::exp(0.5 * d * std::log(2.0) - sigma * t * t / (1.0 * d * d) - 0.5 * sigma * t));
}

}  // namespace closed_form

double trim_threshold(int d, double sigma, double gamma) {
    const double arg = std::pow(d, 4) / (2.0 * gamma * sigma);
    return d * d / (2.0 * std::sqrt(gamma * sigma)) * std::sqrt(std::log(arg));
}

double t_star(int d, double sigma) {
    require_dimension(d);
    check_sigma(sigma);
    return d * d / (2.0 * std::sqrt(sigma)) * std::sqrt(2.0 * std::log(std::pow(d, 4) / sigma));
}

BoundReport bound_trim(int d, double sigma, double t, double gamma) {
    require_dimension(d);
    check_sigma(sigma);
    check_t(t);
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidParameter("gamma must lie in (0, 1)");
    BoundReport r;
    r.name = "bound_trim";
    r.citation = "trimming lemma: L2 distance between H_P and H_P^(t)";
    r.inputs = {{"d", d}, {"sigma", sigma}, {"t", t}, {"gamma", gamma}};
    const double arg = std::pow(d, 4) / (2.0 * gamma * sigma);
    r.preconditions.push_back(leq("log-argument", "d^4/(2 gamma sigma) >= 1", 1.0, arg));
    const double need = arg >= 1.0 ? 2.0 * trim_threshold(d, sigma, gamma) : 0.0;
    r.preconditions.push_back(
        leq("t-condition", "2t >= d^2/sqrt(gamma sigma) * sqrt(log(d^4/(2 gamma sigma)))", need, 2.0 * t));
    r.extras.push_back({"t_threshold", need / 2.0});
    finish(r, closed_form::log_trim(d, sigma, t, gamma));
    return r;
}

BoundReport bound_I0(int d, double sigma, double eps) {
    require_dimension(d);
    check_sigma(sigma);
    check_eps(eps);
    BoundReport r;
    r.name = "bound_I0";
    r.citation = "dominant-term lemma: I0 <= (1/2) exp(-d eps~^2/(16 sigma) + (d^2-1) sigma/24)";
    r.inputs = {{"d", d}, {"sigma", sigma}, {"eps", eps}};
    const double et = eps_tilde(eps);
    r.preconditions.push_back(leq("sigma-condition", "sigma <= eps~^2/32", sigma, et * et / 32.0));
    r.extras.push_back({"eps_tilde", et});
    finish(r, closed_form::log_I0_at_tilde(d, sigma, et));
    return r;
}

BoundReport bound_R(int d, double sigma) {
    require_dimension(d);
    check_sigma(sigma);
    BoundReport r;
    r.name = "bound_R";
    r.citation = "lattice-tail lemma: bound on the k != 0 Poisson terms outside the ball";
    r.inputs = {{"d", d}, {"sigma", sigma}};
    r.preconditions.push_back(
        leq("sigma-condition", "sigma <= 2 pi^2 d/(d^2+d-2)", sigma, 2.0 * kPi * kPi * d / (d * d + d - 2.0)));
    finish(r, closed_form::log_R(d, sigma));
    return r;
}

Rational eta_min(int d) {
    require_dimension(d);
    if (d > 8) throw InvalidDimension("eta_min is exact only for d <= 8");
    std::int64_t p = 1, f = 1;
    for (int k = 1; k <= d; ++k) {
        f *= k;
        p *= f;
    }
    return Rational(1, p);
}

double log_eta_min(int d) { return -log_superfactorial(d); }

BoundReport ratio_R_over_I0_ok(int d, double sigma, double eta) {
    require_dimension(d);
    check_sigma(sigma);
    if (!(eta > 0.0)) throw InvalidParameter("eta must be positive");
    BoundReport r;
    r.name = "ratio_R_over_I0";
    r.citation = "tail-smaller-than-dominant lemma: Rbar <= eta * I0bar";
    r.inputs = {{"d", d}, {"sigma", sigma}, {"eta", eta}};
    r.preconditions.push_back(leq("sigma-condition", "sigma <= 1/(d log d)", sigma, 1.0 / (d * std::log(d))));
    r.preconditions.push_back(leq("eta-condition", "eta >= 1/prod k!", std::exp(log_eta_min(d)), eta));
    const double lr = closed_form::log_R(d, sigma);
    const double li = std::log(eta) + closed_form::log_I0_at_tilde(d, sigma, kPi);
    r.extras = {{"eta_min", std::exp(log_eta_min(d))}, {"log_R", lr}, {"log_eta_I0bar", li}, {"holds", lr <= li ? 1.0 : 0.0}};
    finish(r, lr - li);
    return r;
}

BoundReport bound_outside_ball(int d, double sigma, double t, double eps, double eta) {
    require_dimension(d);
    check_sigma(sigma);
    check_t(t);
    check_eps(eps);
    if (!(eta > 0.0)) throw InvalidParameter("eta must be positive");
    BoundReport r;
    r.name = "bound_outside_ball";
    r.citation = "combined-bounds lemma: mass of |H_P^(t)| outside the projective eps-ball";
    r.inputs = {{"d", d}, {"sigma", sigma}, {"t", t}, {"eps", eps}, {"eta", eta}};
    const double arg = std::pow(d, 4) / sigma;
    r.preconditions.push_back(leq("log-argument", "d^4/sigma >= 1", 1.0, arg));
    const double need = arg >= 1.0 ? 2.0 * t_star(d, sigma) : 0.0;
    r.preconditions.push_back(leq("t-condition", "2t >= d^2/sqrt(sigma) * sqrt(2 log(d^4/sigma))", need, 2.0 * t));
    r.preconditions.push_back(
        leq("sigma-condition", "sigma <= eps^2/(32 d log d)", sigma, eps * eps / (32.0 * d * std::log(d))));
    r.preconditions.push_back(leq("eta-condition", "eta >= 1/prod k!", std::exp(log_eta_min(d)), eta));
    finish(r, closed_form::log_outside_ball(d, sigma, t, eps, eta));
    return r;
}

BoundReport bound_L2(int d, double sigma, double t, std::optional<double> eta) {
    require_dimension(d);
    check_sigma(sigma);
    check_t(t);
    const double e = eta.value_or(std::exp(log_eta_min(d)));
    if (!(e > 0.0)) throw InvalidParameter("eta must be positive");
    BoundReport r;
    r.name = "bound_L2";
    r.citation = "L2 lemma: ||H_P^(t)||_2 <= d I00 + d sqrt(d!)/2^(m-1) eta I0bar";
    r.inputs = {{"d", d}, {"sigma", sigma}, {"t", t}, {"eta", e}};
    r.preconditions.push_back(leq("sigma-condition", "sigma <= 1/(d log d)", sigma, 1.0 / (d * std::log(d))));
    r.preconditions.push_back(leq("eta-condition", "eta >= 1/prod k!", std::exp(log_eta_min(d)), e));
    r.extras.push_back({"log_I00", closed_form::log_I00(d, sigma)});
    finish(r, closed_form::log_L2(d, sigma, e));
    return r;
}

BoundReport bound_L2_simple(int d, double sigma) {
    require_dimension(d);
    check_sigma(sigma);
    BoundReport r;
    r.name = "bound_L2_simple";
    r.citation = "L2 corollary: ||H_P^(t)||_2 <= c (d/sigma)^((d^2-1)/4)";
    r.inputs = {{"d", d}, {"sigma", sigma}};
    r.preconditions.push_back(leq("sigma-condition", "sigma <= 1/(d log d)", sigma, 1.0 / (d * std::log(d))));
    r.extras.push_back({"c", d >= 12 ? 1.0 : 8.0});
    finish(r, closed_form::log_L2_simple(d, sigma));
    return r;
}

BoundReport bound_L1_trimmed(int d, double sigma, double t) {
    require_dimension(d);
    check_sigma(sigma);
    check_t(t);
    BoundReport r;
    r.name = "bound_L1_trimmed";
    r.citation = "approximate-identity theorem, point 5: bounded L1 norm";
    r.inputs = {{"d", d}, {"sigma", sigma}, {"t", t}};
    const double ts = t_star(d, sigma);
    r.preconditions.push_back(leq("t-condition", "t >= t_* = d^2/(2 sqrt(sigma)) sqrt(2 log(d^4/sigma))", ts, t));
    r.extras.push_back({"t_star", ts});
    finish(r, closed_form::log_L1_trimmed(d, sigma, t));
    return r;
}

double theorem1_t_min(int d, double eps) {
    require_dimension(d);
    check_eps(eps);
    return 32.0 * std::pow(d, 2.5) / eps * std::log(d) * std::log(4.0 / (kAv * eps));
}

DeltaForm parse_delta_form(const std::string& s) {
    if (s == "theorem") return DeltaForm::theorem;
    if (s == "kappa") return DeltaForm::kappa;
    if (s == "exponential") return DeltaForm::exponential;
    throw InvalidParameter("unknown delta_max form '" + s + "' (expected theorem, kappa or exponential)");
}

const char* to_string(DeltaForm f) {
    switch (f) {
        case DeltaForm::theorem: return "theorem";
        case DeltaForm::kappa: return "kappa";
        case DeltaForm::exponential: return "exponential";
    }
    return "?";
}

double log_kappa(int d) {
    require_dimension(d);
    const double ld = std::log(d);
    return (d * d / 16.0 - 17.0 / 4.0 - d / (768.0 * ld * ld * std::log(1.0 / kAv))) * ld;
}

double kappa(int d) { return std::exp(log_kappa(d)); }

double theorem2_log_delta_max(int d, double eps, DeltaForm form) {
    require_dimension(d);
    check_eps(eps);
    const double n = d * d - 1.0;
    const double ld = std::log(d);
    switch (form) {
        case DeltaForm::theorem:
            return n * (std::log(eps) - std::log(4.0 * kNetC) - 0.25 * std::log(std::log(2.0 * kNetC / eps)) -
                        0.25 * std::log(ld) - 0.5 * ld);
        case DeltaForm::kappa:
            return 0.5 * n * (std::log(kAv) - 4.5 * std::log(2.0)) +
                   n * (std::log(eps) - 0.25 * std::log(std::log(2.0 / (kAv * eps))) - 0.25 * std::log(ld) - 0.5 * ld) +
                   log_kappa(d);
        case DeltaForm::exponential: {
            const double l2 = std::log(2.0 / (kAv * eps));
            return 0.5 * n * (std::log(kAv) - 4.5 * std::log(2.0)) +
                   n * (std::log(eps) - 0.25 * std::log(l2) - 0.25 * std::log(ld)) -
                   n * eps * eps / (3072.0 * d * ld * l2) - (7.0 / 16.0 * d * d + 15.0 / 4.0) * ld;
        }
    }
    throw InvalidParameter("unknown delta_max form");
}

double application1_D() { return 8.0 * std::pow(kNetC, 2.0 / 3.0) * std::cbrt(std::log(2.0 * kNetC)); }

double application1_ell(int d, double eps, double delta) {
    require_dimension(d);
    check_eps(eps);
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta must lie in (0, 1)");
    const double num = -log_kappa(d) + (d * d - 1.0) * (1.25 * std::log(1.0 / eps) + 0.75 * std::log(application1_D() * d));
    return num / std::log(1.0 / delta);
}

double sigma_star(int d, double eps) {
    require_dimension(d);
    check_eps(eps);
    return eps * eps / (128.0 * d * std::log(d) * std::log(2.0 / (kAv * eps)));
}

double volume_lower_bound_log(int d, double kr) {
    require_dimension(d);
    if (!(kr > 0.0 && kr <= 2.0)) throw InvalidParameter("ball radius must lie in (0, 2]");
    return (d * d - 1.0) * std::log(kAv * kr);
}

double upper_incomplete_gamma_quadrature(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0)) throw InvalidParameter("incomplete gamma needs s > 0, x >= 0");
    // Gamma(s, x) = e^{-x} int_0^inf (x+u)^{s-1} e^{-u} du
    auto f = [&](double u) { return std::exp((s - 1.0) * std::log(x + u) - u); };
    double err = 0.0;
    const double inner = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-12, &err);
    return std::exp(-x) * inner;
}

bool AuxReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

AuxReport aux_inequalities_check(int d_max, int trials, std::uint64_t seed) {
    if (d_max < 2) throw InvalidDimension("d_max must be >= 2");
    if (trials < 1) throw InvalidParameter("trials must be >= 1");
    using boost::multiprecision::cpp_int;
    AuxReport rep;

    {
        AuxCheck c{"shell-count", true, 0, ""};
        double tightest = 0.0;
        for (int d = 1; d <= d_max; ++d)
            for (int r = 1; r <= 100; ++r) {
                cpp_int a = 1, b = 1, rhs = cpp_int(1) << d;
                for (int i = 0; i < d; ++i) {
                    a *= 2 * r + 1;
                    b *= 2 * r - 1;
                }
                for (int i = 0; i < d - 1; ++i) rhs *= 2 * r;
                const cpp_int lhs = a - b;
                ++c.cases;
                if (lhs > rhs) c.passed = false;
                const double ratio = static_cast<double>(lhs) / static_cast<double>(rhs);
                if (ratio >= tightest) {
                    tightest = ratio;
                    std::ostringstream os;
                    os << "d=" << d << " r=" << r << " lhs/rhs=" << ratio;
                    c.worst = os.str();
                }
            }
        rep.checks.push_back(c);
    }
    {
        AuxCheck c{"incomplete-gamma", true, 0, ""};
        std::mt19937_64 eng(seed);
        std::uniform_real_distribution<double> us(1.0, 20.0), ux(0.0, 60.0);
        double tightest = -kNegInf;
        for (int i = 0; i < trials; ++i) {
            const double s = i == 0 ? 1.0 : us(eng);
            const double x = (s - 1.0) + 1e-3 + ux(eng);
            const double lhs = std::log(upper_incomplete_gamma_quadrature(s, x));
            const double rhs = -x + s * std::log(x) - std::log(x - s + 1.0);
            ++c.cases;
            // relative slack for the equality case s = 1
            if (lhs > rhs + 1e-9) c.passed = false;
            if (rhs - lhs < tightest) {
                tightest = rhs - lhs;
                std::ostringstream os;
                os << "s=" << s << " x=" << x << " log(rhs)-log(lhs)=" << rhs - lhs;
                c.worst = os.str();
            }
        }
        rep.checks.push_back(c);
    }
    {
        AuxCheck c{"factorial-product", true, 0, ""};
        for (int d = 2; d <= d_max; ++d) {
            const double lhs = -(d * d / 8.0) * std::log(d / 4.0);
            const double rhs = -log_superfactorial(d);
            ++c.cases;
            if (lhs < rhs) c.passed = false;
            if (d == d_max) {
                std::ostringstream os;
                os << "d=" << d << " log lhs=" << lhs << " log rhs=" << rhs;
                c.worst = os.str();
            }
        }
        rep.checks.push_back(c);
    }
    {
        AuxCheck c{"szarek-boundary", true, 0, ""};
        for (int d = 2; d <= d_max; ++d)
            for (double extra : {0.0, 0.5, 1.0, 3.0}) {
                const double r = 2.0 * std::sqrt(d) + extra;
                const double rhs = 0.5 * std::exp(-(d / 2.0) * std::pow(r / std::sqrt(d) - 2.0, 2));
                ++c.cases;
                if (rhs > 0.5) c.passed = false;
            }
        c.worst = "rhs = 1/2 at r = 2 sqrt(d)";
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace udnet
