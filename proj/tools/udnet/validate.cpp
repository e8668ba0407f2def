#include <cmath>
#include <functional>
#include <ostream>

#include "cli.hpp"
#include "udnet/bounds.hpp"
#include "udnet/errors.hpp"
#include "udnet/kernels.hpp"
#include "udnet/logmath.hpp"
#include "udnet/montecarlo.hpp"

namespace udnet::cli {

namespace {

// Term-evaluations allowed for one MC check before it is skipped.
constexpr double kMcBudget = 5e7;

struct Ctx {
    const ValidateOptions& opt;
    Report& report;
    std::ostream& log;
    bool ok = true;

    void add(const std::string& suite, const std::string& check, const std::string& status, std::optional<Num> measured,
             std::optional<Num> bound, const std::string& detail = "") {
        Record rec;
        rec.str("suite", suite).str("check", check).str("status", status);
        if (measured) rec.fields.emplace_back("measured", *measured);
        if (bound) rec.fields.emplace_back("bound", *bound);
        rec.str("detail", detail);
        report.rows.push_back(std::move(rec));
        if (status == "fail") ok = false;
        log << (status == "pass" ? "PASS " : status == "fail" ? "FAIL " : "SKIP ") << suite << ": " << check;
        if (measured) log << " measured=" << format_double(measured->value);
        if (bound) log << " bound=" << format_double(bound->value);
        if (!detail.empty()) log << " (" << detail << ")";
        if (status.rfind("skipped", 0) == 0) log << " [" << status << "]";
        log << '\n';
    }
    void skip(const std::string& suite, const std::string& check, const std::string& why) {
        add(suite, check, "skipped: " + why, std::nullopt, std::nullopt);
    }
};

Num cf(double v) { return {v, kClosedForm, std::nullopt}; }
Num quad(double v) { return {v, kQuadrature, std::nullopt}; }
Num planch(double v) { return {v, kPlancherel, std::nullopt}; }
Num mcn(const McEstimate& e) { return {e.mean, kMc, e.std_error}; }

std::string fmt(const char* name, double v) { return std::string(name) + "=" + format_double(v); }

std::size_t n_or(const ValidateOptions& o, std::size_t def) { return o.n ? *o.n : def; }

// Statistical checks below get one retry on a fresh stream before failing.

void suite_trimming(Ctx& c) {
    const int d = c.opt.d;
    for (double sigma : {0.005, 0.05, 0.5}) {
        const double t0 = std::ceil(trim_threshold(d, sigma, 0.5));
        for (double t : {t0, 2 * t0}) {
            const std::string name = fmt("sigma", sigma) + " " + fmt("t", t);
            const auto b = bound_trim(d, sigma, t, 0.5);
            if (!b.log_value) {
                c.skip("trimming", name, "precondition " + b.violated().value_or("?"));
                continue;
            }
            try {
                const auto e = trimming_error_sq_log(d, sigma, static_cast<int>(t), 1e-12, 2'000'000);
                const double lm = 0.5 * e.log_value;
                c.add("trimming", "log trimming_error <= log bound_trim, " + name, lm < *b.log_value ? "pass" : "fail",
                      planch(lm), cf(*b.log_value));
            } catch (const TruncationFailure&) {
                c.skip("trimming", name, "Plancherel enumeration above 2e6 terms");
            }
        }
    }
}

void suite_i0(Ctx& c) {
    const int d = c.opt.d;
    if (d > 3) {
        c.skip("i0", "numeric_I0 <= bound_I0", "unsupported-dimension");
        return;
    }
    const int grid = d == 2 ? 512 : 128;
    for (double eps : {0.5, 1.0, 1.5})
        for (double f : {1.0, 0.5}) {
            const double et = eps_tilde(eps);
            const double sigma = f * et * et / 32.0;
            const auto b = bound_I0(d, sigma, eps);
            const double lm = numeric_I0_log(d, sigma, eps, grid);
            const std::string name = "log numeric_I0 <= log bound_I0, " + fmt("eps", eps) + " " + fmt("sigma", sigma);
            if (!b.log_value) {
                c.skip("i0", name, "precondition " + b.violated().value_or("?"));
                continue;
            }
            c.add("i0", name, lm <= *b.log_value ? "pass" : "fail", quad(lm), cf(*b.log_value));
        }
}

void suite_outside_ball(Ctx& c) {
    const int d = c.opt.d;
    const std::size_t n = n_or(c.opt, 100'000);
    struct Case {
        double sigma, eps;
    };
    for (Case k : {Case{0.005, 0.5}, Case{0.01, 1.0}}) {
        const std::string name = "MC outside-ball mass <= bound + 3 se, " + fmt("sigma", k.sigma) + " " + fmt("eps", k.eps);
        const int t = static_cast<int>(std::ceil(t_star(d, k.sigma)));
        const double eta = std::exp(log_eta_min(d));
        const double lb = closed_form::log_outside_ball(d, k.sigma, t, k.eps, eta);
        KernelParams p;
        p.d = d;
        p.sigma = k.sigma;
        p.trim_t = t;
        p.max_terms = 2'000'000;
        std::size_t size = 0;
        try {
            size = CharacterExpansion::pu_heat(p).size();
        } catch (const TruncationFailure&) {
            c.skip("outside-ball", name, "trimmed expansion above 2e6 terms");
            continue;
        }
        if (static_cast<double>(size) * static_cast<double>(n) > kMcBudget) {
            c.skip("outside-ball", name, "expansion size x n above the MC budget");
            continue;
        }
        auto run = [&](const RngStream& r) { return mc_outside_ball(d, k.sigma, t, k.eps, n, r); };
        auto ok = [&](const McEstimate& e) { return e.mean <= std::exp(lb) + 3 * e.std_error; };
        McEstimate e = run(RngStream(c.opt.seed, 11));
        if (!ok(e)) e = run(RngStream(c.opt.seed, 11 + 0x1000));
        c.add("outside-ball", name, ok(e) ? "pass" : "fail", mcn(e), cf(std::exp(lb)),
              bound_outside_ball(d, k.sigma, t, k.eps, eta).violated().value_or("all preconditions hold"));
    }
    // P-ball mass against the SU ball mass
    for (double sigma : {0.05, 0.1})
        for (double eps : {0.3, 0.5}) {
            const std::string name = "PU mass outside ball <= SU mass outside ball, " + fmt("sigma", sigma) + " " +
                                     fmt("eps", eps);
            KernelParams p;
            p.d = d;
            p.sigma = sigma;
            p.max_terms = 2'000'000;
            std::size_t size = 0;
            try {
                size = CharacterExpansion::su_heat(p).size() + CharacterExpansion::pu_heat(p).size();
            } catch (const TruncationFailure&) {
                c.skip("outside-ball", name, "expansion above 2e6 terms");
                continue;
            }
            if (static_cast<double>(size) * static_cast<double>(n) > kMcBudget) {
                c.skip("outside-ball", name, "expansion size x n above the MC budget");
                continue;
            }
            auto attempt = [&](std::uint64_t stream) {
                const auto a = mc_pu_outside_projective_ball(d, sigma, eps, n, RngStream(c.opt.seed, stream));
                const auto b = mc_su_outside_ball(d, sigma, eps, n, RngStream(c.opt.seed, stream + 1));
                return std::pair{a, b};
            };
            auto ok = [](const std::pair<McEstimate, McEstimate>& ab) {
                const double se = std::hypot(ab.first.std_error, ab.second.std_error);
                return ab.first.mean <= ab.second.mean + 3 * se;
            };
            auto ab = attempt(21);
            if (!ok(ab)) ab = attempt(21 + 0x1000);
            c.add("outside-ball", name, ok(ab) ? "pass" : "fail", mcn(ab.first), mcn(ab.second));
        }
}

void suite_l2(Ctx& c) {
    const int d = c.opt.d;
    const double smax = 1.0 / (d * std::log(d));
    for (double sigma : {smax, 0.5 * smax}) {
        const auto b = bound_L2_simple(d, sigma);
        for (int t : {1, 2, 4, 8}) {
            const std::string name = fmt("sigma", sigma) + " " + fmt("t", t);
            if (!b.log_value) {
                c.skip("l2", name, "precondition " + b.violated().value_or("?"));
                continue;
            }
            const double l2 = l2_norm_trimmed(d, sigma, t);
            c.add("l2", "l2_norm_trimmed <= bound_L2_simple, " + name, std::log(l2) <= *b.log_value ? "pass" : "fail",
                  planch(l2), cf(std::exp(*b.log_value)));
        }
        for (int t : {2, 6}) {
            const std::string name = "Pythagoras, " + fmt("sigma", sigma) + " " + fmt("t", t);
            try {
                const auto u = l2_norm_untrimmed(d, sigma);
                const auto te = trimming_error_sq_log(d, sigma, t, 1e-14, 2'000'000);
                const double l2 = l2_norm_trimmed(d, sigma, t);
                const double lhs = std::exp(te.log_value) + l2 * l2;
                const double rel = std::abs(lhs - u.value * u.value) / (u.value * u.value);
                c.add("l2", name, rel <= 1e-10 ? "pass" : "fail", planch(rel), cf(1e-10), "relative deviation");
            } catch (const TruncationFailure&) {
                c.skip("l2", name, "Plancherel enumeration above 2e6 terms");
            }
        }
    }
}

void suite_gue(Ctx& c) {
    const int d = c.opt.d;
    const std::size_t n = n_or(c.opt, 200'000);
    std::uint64_t stream = 31;
    for (double extra : {0.5, 1.5}) {
        const double r = 2 * std::sqrt(static_cast<double>(d)) + extra;
        const double z = r / std::sqrt(static_cast<double>(d)) - 2.0;
        const double bound = 0.5 * std::exp(-0.5 * d * z * z);
        auto ok = [&](const McEstimate& e) { return e.mean <= bound + 3 * e.std_error; };
        McEstimate e = gue_tail_mc(d, r, n, RngStream(c.opt.seed, stream));
        if (!ok(e)) e = gue_tail_mc(d, r, n, RngStream(c.opt.seed, stream + 0x1000));
        c.add("gue", "tail P(||A|| >= r) <= Szarek bound + 3 se, " + fmt("r", r), ok(e) ? "pass" : "fail", mcn(e),
              cf(bound));
        ++stream;
    }
    if (d != 2) {
        c.skip("gue", "GUE0 density normalization", "unsupported-dimension");
        return;
    }
    const double total = gue0_probability_d2(INFINITY);
    c.add("gue", "GUE0 density normalization", std::abs(total - 1) <= 1e-8 ? "pass" : "fail", quad(total), cf(1.0));
    const double r = 1.0;
    const double exact = 1.0 - gue0_probability_d2(r);
    auto ok = [&](const McEstimate& e) { return std::abs(e.mean - exact) <= 5 * e.std_error; };
    McEstimate e = gue_tail_mc(2, r, n, RngStream(c.opt.seed, 41));
    if (!ok(e)) e = gue_tail_mc(2, r, n, RngStream(c.opt.seed, 41 + 0x1000));
    c.add("gue", "MC tail matches GUE0 quadrature within 5 se, r=1", ok(e) ? "pass" : "fail", mcn(e), quad(exact));
}

void suite_orthonormality(Ctx& c) {
    const int d = c.opt.d;
    if (d > 3) {
        c.skip("orthonormality", "character Gram matrix", "unsupported-dimension");
        return;
    }
    const int max_norm = d == 2 ? 8 : 4;
    const int grid = d == 2 ? 512 : 128;
    const auto ws = enumerate_projective_weights(d, max_norm / 2);
    // one pass over the grid; Gram entries accumulated per point
    const std::size_t k = ws.size();
    std::vector<std::complex<double>> gram(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            const auto v = torus_quadrature_complex(d, grid, [&](const TorusPoint& x) {
                return character(ws[a], x) * std::conj(character(ws[b], x));
            });
            gram[a * k + b] = v;
        }
    double worst = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) worst = std::max(worst, std::abs(gram[a * k + b] - (a == b ? 1.0 : 0.0)));
    c.add("orthonormality", "max |Gram - I| over " + std::to_string(k) + " projective characters",
          worst <= 1e-6 ? "pass" : "fail", quad(worst), cf(1e-6));
}

void suite_poisson_char(Ctx& c) {
    const int d = c.opt.d;
    RngStream rng(c.opt.seed, 51);
    for (double sigma : {0.05, 0.1, 0.5}) {
        KernelParams p;
        p.d = d;
        p.sigma = sigma;
        p.max_terms = 2'000'000;
        const std::string name = "relative |char - poisson| <= 1e-7, " + fmt("sigma", sigma);
        try {
            const auto e = CharacterExpansion::su_heat(p);
            double worst = 0.0;
            int points = 0, draws = 0;
            while (points < 10 && draws < 100000) {
                ++draws;
                std::vector<double> phi(static_cast<std::size_t>(d - 1));
                for (auto& a : phi) a = -kPi + 2 * kPi * rng.uniform();
                const TorusPoint x(d, phi);
                if (x.min_gap() < 1e-3) continue;
                const auto pv = heat_su_poisson(p, x);
                if (std::abs(pv.value) < 1e-3) continue;
                const auto cv = e.evaluate(x);
                worst = std::max(worst, std::abs(cv.value - pv.value) / std::abs(pv.value));
                ++points;
            }
            c.add("poisson-char", name, worst <= 1e-7 ? "pass" : "fail", cf(worst), cf(1e-7),
                  std::to_string(points) + " points");
        } catch (const TruncationFailure&) {
            c.skip("poisson-char", name, "character expansion above 2e6 terms");
        }
    }
}

void suite_normalization(Ctx& c) {
    const int d = c.opt.d;
    // MC variance is the Plancherel sum, so d >= 4 uses wider kernels
    const std::vector<double> sigmas = d <= 3 ? std::vector<double>{0.1, 0.5} : std::vector<double>{2.0, 4.0};
    for (double sigma : sigmas) {
        KernelParams p;
        p.d = d;
        p.sigma = sigma;
        p.max_terms = 2'000'000;
        const std::string name = "integral of H_P = 1, " + fmt("sigma", sigma);
        try {
            const auto e = CharacterExpansion::pu_heat(p);
            if (d <= 3) {
                const double v = torus_quadrature(d, d == 2 ? 512 : 128, [&](const TorusPoint& x) {
                    return e.evaluate(x).value;
                });
                c.add("normalization", name, std::abs(v - 1) <= 1e-8 ? "pass" : "fail", quad(v), cf(1.0));
            } else {
                const std::size_t n = n_or(c.opt, 5'000);
                if (static_cast<double>(e.size()) * static_cast<double>(n) > kMcBudget) {
                    c.skip("normalization", name, "expansion size x n above the MC budget");
                    continue;
                }
                auto ok = [](const McEstimate& m) { return std::abs(m.mean - 1) <= 4 * m.std_error + 1e-12; };
                McEstimate m = mc_normalization(d, sigma, std::nullopt, n, RngStream(c.opt.seed, 61));
                if (!ok(m)) m = mc_normalization(d, sigma, std::nullopt, n, RngStream(c.opt.seed, 61 + 0x1000));
                c.add("normalization", name, ok(m) ? "pass" : "fail", mcn(m), cf(1.0));
            }
        } catch (const TruncationFailure&) {
            c.skip("normalization", name, "expansion above 2e6 terms");
        }
    }
    if (d <= 3) {
        KernelParams p;
        p.d = d;
        p.sigma = 0.2;
        p.trim_t = 3;
        const auto e = CharacterExpansion::pu_heat(p);
        const double v = torus_quadrature(d, d == 2 ? 64 : 32, [&](const TorusPoint& x) { return e.evaluate(x).value; });
        c.add("normalization", "integral of trimmed H_P = 1, t=3", std::abs(v - 1) <= 1e-10 ? "pass" : "fail", quad(v),
              cf(1.0));
    } else {
        // few weights at t=3, so Monte Carlo is cheap at any d
        const std::size_t n = n_or(c.opt, 100'000);
        auto ok = [](const McEstimate& m) { return std::abs(m.mean - 1) <= 4 * m.std_error + 1e-12; };
        McEstimate m = mc_normalization(d, 2.0, 3, n, RngStream(c.opt.seed, 62));
        if (!ok(m)) m = mc_normalization(d, 2.0, 3, n, RngStream(c.opt.seed, 62 + 0x1000));
        c.add("normalization", "integral of trimmed H_P = 1 (MC), sigma=2 t=3", ok(m) ? "pass" : "fail", mcn(m), cf(1.0));
    }
}

}  // namespace

bool run_validate(const ValidateOptions& o, Report& report, std::ostream& log) {
    Ctx c{o, report, log};
    const std::vector<std::pair<std::string, std::function<void(Ctx&)>>> suites = {
        {"trimming", suite_trimming},         {"i0", suite_i0},
        {"outside-ball", suite_outside_ball}, {"l2", suite_l2},
        {"gue", suite_gue},                   {"orthonormality", suite_orthonormality},
        {"poisson-char", suite_poisson_char}, {"normalization", suite_normalization},
    };
    bool found = false;
    for (const auto& [name, fn] : suites)
        if (o.suite == "all" || o.suite == name) {
            found = true;
            fn(c);
        }
    if (!found) throw InvalidParameter("--suite: unknown suite '" + o.suite + "'");
    return c.ok;
}

}  // namespace udnet::cli
