#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "udnet/bounds.hpp"
#include "udnet/design.hpp"
#include "udnet/errors.hpp"
#include "udnet/kernels.hpp"

namespace udnet::cli {

namespace {

struct Common {
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "RNG seed (default 0, or UDNET_SEED)");
    app->add_option("--threads", c.threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", c.out, "output file (default stdout)");
}

void resolve_common(Common& c, CLI::App* app) {
    c.seed_given = app->count("--seed") > 0;
    if (!c.seed_given) {
        if (const char* env = std::getenv("UDNET_SEED")) {
            try {
                std::size_t pos = 0;
                c.seed = std::stoull(env, &pos);
                if (pos != std::string(env).size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw InvalidParameter(std::string("UDNET_SEED is not an unsigned integer: '") + env + "'");
            }
        }
    }
    if (c.threads == 0) c.threads = omp_get_num_procs();
    omp_set_num_threads(c.threads);
}

void echo_common(ojson& cfg, const Common& c) {
    cfg["seed"] = c.seed;
    cfg["threads"] = c.threads;
    cfg["format"] = c.format;
    cfg["out"] = c.out.empty() ? "-" : c.out;
}

void check_d(int d) {
    if (d < 2 || d > 20) throw InvalidParameter("--d must be an integer in [2, 20], got " + std::to_string(d));
}

void check_eps(double eps) {
    if (!(eps > 0.0 && eps <= 2.0))
        throw InvalidParameter("--eps must lie in (0, 2], got " + format_double(eps));
}

void check_sigma(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidParameter("--sigma must be positive, got " + format_double(s));
}

void add_bound(Record& rec, const BoundReport& b) {
    if (auto v = b.log_value)
        rec.num(b.name + ".log", *v, kClosedForm);
    else
        rec.str(b.name + ".violated", b.violated().value_or(""));
    for (const auto& p : b.preconditions) rec.flag(b.name + "." + p.name, p.ok);
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    int d = 2;
    double eps = 0.1;
    std::string form = "all";
    std::optional<double> delta, sigma, t, eta;
    double gamma = 0.5;
};

Report cmd_bounds(const BoundsArgs& a, const Common& c) {
    check_d(a.d);
    check_eps(a.eps);
    if (a.delta && !(*a.delta > 0.0 && *a.delta < 1.0))
        throw InvalidParameter("--delta must lie in (0, 1), got " + format_double(*a.delta));
    if (!(a.gamma > 0.0 && a.gamma < 1.0))
        throw InvalidParameter("--gamma must lie in (0, 1), got " + format_double(a.gamma));
    std::vector<DeltaForm> forms;
    if (a.form == "all")
        forms = {DeltaForm::theorem, DeltaForm::kappa, DeltaForm::exponential};
    else
        forms = {parse_delta_form(a.form)};

    Report r;
    r.command = "bounds";
    r.config["d"] = a.d;
    r.config["eps"] = a.eps;
    r.config["form"] = a.form;
    r.config["delta"] = a.delta ? ojson(*a.delta) : ojson(nullptr);
    r.config["gamma"] = a.gamma;
    r.config["sigma"] = a.sigma ? ojson(*a.sigma) : ojson(nullptr);
    r.config["t"] = a.t ? ojson(*a.t) : ojson(nullptr);
    r.config["eta"] = a.eta ? ojson(*a.eta) : ojson(nullptr);
    echo_common(r.config, c);

    Record rec;
    rec.num("t_min", theorem1_t_min(a.d, a.eps), kClosedForm);
    for (auto f : forms) {
        const double lg = theorem2_log_delta_max(a.d, a.eps, f);
        rec.num(std::string("log10_delta_max.") + to_string(f), lg / std::log(10.0), kClosedForm);
        rec.num(std::string("delta_max.") + to_string(f), std::exp(lg), kClosedForm);
    }
    const double ss = sigma_star(a.d, a.eps);
    rec.num("sigma_star", ss, kClosedForm);
    rec.num("t_star", t_star(a.d, ss), kClosedForm);
    rec.num("kappa", kappa(a.d), kClosedForm);
    rec.num("eta_min", std::exp(log_eta_min(a.d)), kClosedForm);
    if (a.delta) rec.num("ell", application1_ell(a.d, a.eps, *a.delta), kClosedForm);
    if (a.sigma) {
        check_sigma(*a.sigma);
        const double s = *a.sigma;
        const double t = a.t ? *a.t : std::ceil(t_star(a.d, s));
        const double eta = a.eta ? *a.eta : std::exp(log_eta_min(a.d));
        rec.input("t_used", t);
        add_bound(rec, bound_trim(a.d, s, t, a.gamma));
        add_bound(rec, bound_I0(a.d, s, a.eps));
        add_bound(rec, bound_R(a.d, s));
        add_bound(rec, ratio_R_over_I0_ok(a.d, s, eta));
        add_bound(rec, bound_outside_ball(a.d, s, t, a.eps, eta));
        add_bound(rec, bound_L2(a.d, s, t, eta));
        add_bound(rec, bound_L2_simple(a.d, s));
        add_bound(rec, bound_L1_trimmed(a.d, s, t));
    }
    r.rows.push_back(std::move(rec));
    return r;
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
    int d = 2;
    double sigma = 0.1;
    std::optional<int> trim_t;
    std::string form = "auto";
    std::string group = "pu";
    std::vector<double> phi;
    double tail_tol = 1e-12;
};

Report cmd_kernel(KernelArgs a, const Common& c) {
    check_d(a.d);
    check_sigma(a.sigma);
    if (a.trim_t && *a.trim_t < 0) throw InvalidParameter("--trim-t must be >= 0");
    if (a.phi.empty()) a.phi.assign(static_cast<std::size_t>(a.d - 1), 0.0);
    if (static_cast<int>(a.phi.size()) != a.d - 1)
        throw InvalidParameter("--phi needs d-1 = " + std::to_string(a.d - 1) + " angles, got " +
                               std::to_string(a.phi.size()));
    if (a.form == "auto") a.form = a.trim_t ? "char" : "both";
    if (a.trim_t && a.form != "char")
        throw InvalidParameter("--form " + a.form + ": the trimmed kernel only has a character form");
    if (a.trim_t && a.group != "pu") throw InvalidParameter("--trim-t applies to --group pu only");

    Report r;
    r.command = "kernel";
    r.config["d"] = a.d;
    r.config["sigma"] = a.sigma;
    r.config["trim_t"] = a.trim_t ? ojson(*a.trim_t) : ojson(nullptr);
    r.config["form"] = a.form;
    r.config["group"] = a.group;
    r.config["phi"] = a.phi;
    r.config["tail_tol"] = a.tail_tol;
    echo_common(r.config, c);

    KernelParams p;
    p.d = a.d;
    p.sigma = a.sigma;
    p.trim_t = a.trim_t;
    p.tail_tol = a.tail_tol;
    const TorusPoint x(a.d, a.phi);
    const bool pu = a.group == "pu";
    Record rec;
    std::optional<double> vc, vp;
    if (a.form == "char" || a.form == "both") {
        const auto e = pu ? heat_pu_char(p, x) : heat_su_char(p, x);
        rec.num("char.value", e.value, kPlancherel);
        rec.num("char.truncation_bound", e.truncation_bound, kClosedForm);
        rec.integer("char.terms_used", static_cast<long long>(e.terms_used));
        vc = e.value;
    }
    if (a.form == "poisson" || a.form == "both") {
        const auto e = pu ? heat_pu_poisson(p, x) : heat_su_poisson(p, x);
        rec.num("poisson.value", e.value, kClosedForm);
        rec.num("poisson.truncation_bound", e.truncation_bound, kClosedForm);
        rec.integer("poisson.terms_used", static_cast<long long>(e.terms_used));
        vp = e.value;
    }
    if (vc && vp) {
        const double den = std::max({std::abs(*vc), std::abs(*vp), 1e-300});
        rec.num("relative_discrepancy", std::abs(*vc - *vp) / den, kClosedForm);
    }
    r.rows.push_back(std::move(rec));
    return r;
}

// ---------------------------------------------------------------- design-delta

// delta is computed to about 1e-10; anything this small is an exact design
constexpr double kExactDelta = 1e-12;

struct DesignArgs {
    std::string gateset;
    int t = 1;
    std::size_t cap = kDefaultMomentCap;
};

WeightedGateSet load_gateset(const std::string& spec) {
    if (spec == "builtin:pauli") return WeightedGateSet::uniform(2, pauli_gates());
    if (spec == "builtin:clifford24") return WeightedGateSet::uniform(2, clifford24_gates());
    if (spec == "builtin:identity") return WeightedGateSet::uniform(2, {CMatrix::Identity(2, 2)});
    if (spec.rfind("builtin:", 0) == 0) throw InvalidParameter("unknown builtin gate set '" + spec + "'");
    return WeightedGateSet::load(spec);
}

// smallest eps in (0, 2] with f(eps) true, f monotone; nullopt if f(2) is false
template <class F>
std::optional<double> bisect_eps(F&& f) {
    if (!f(2.0)) return std::nullopt;
    double lo = 1e-300, hi = 2.0;
    if (f(lo)) return lo;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = lo < 1e-8 * hi ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        (f(mid) ? hi : lo) = mid;
    }
    return hi;
}

Report cmd_design_delta(const DesignArgs& a, const Common& c) {
    if (a.gateset.empty()) throw InvalidParameter("--gateset is required");
    if (a.t < 1) throw InvalidParameter("--t must be >= 1");
    const auto nu = load_gateset(a.gateset);
    // fail early on the cap, before any work
    moment_dimension(nu.d(), a.t, a.cap);

    Report r;
    r.command = "design-delta";
    r.config["gateset"] = a.gateset;
    r.config["t"] = a.t;
    r.config["cap"] = a.cap;
    r.config["d"] = nu.d();
    r.config["elements"] = nu.size();
    echo_common(r.config, c);
    r.columns = {{"s", false}, {"delta", true}, {"exact", false}, {"implied_eps", false}, {"t_condition", false}};
    for (int s = 1; s <= a.t; ++s) {
        const double delta = delta_design(nu, s, a.cap, c.seed);
        Record rec;
        rec.integer("s", s);
        rec.num("delta", delta, kQuadrature);
        // smallest eps whose theorem-form delta_max admits the measured delta
        const bool exact = delta <= kExactDelta;
        rec.flag("exact", exact);
        const double ld = exact ? -INFINITY : std::log(delta);
        const auto eps = bisect_eps([&](double e) {
            return theorem2_log_delta_max(nu.d(), e, DeltaForm::theorem) >= ld;
        });
        if (eps && !exact) {
            rec.str("implied_eps", format_double(*eps));
            rec.flag("t_condition", s >= theorem1_t_min(nu.d(), *eps));
        } else if (eps) {
            // numerically exact design; only the t-condition limits eps
            const auto e1 = bisect_eps([&](double e) { return theorem1_t_min(nu.d(), e) <= s; });
            rec.str("implied_eps", e1 ? format_double(*e1) : "none");
            rec.flag("t_condition", e1.has_value());
        } else {
            rec.str("implied_eps", "none");
            rec.flag("t_condition", false);
        }
        r.rows.push_back(std::move(rec));
    }
    return r;
}

void emit(const Report& r, const Common& c, std::ostream& out) {
    std::ostringstream buf;
    if (c.format == "csv")
        write_csv(buf, r);
    else
        write_json(buf, r);
    if (c.out.empty() || c.out == "-") {
        out << buf.str();
        out.flush();
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw InvalidParameter("--out: cannot open '" + c.out + "'");
        f << buf.str();
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"heat-kernel and t-design net calculators", "udnet"};
    app.require_subcommand(1);

    Common common;
    BoundsArgs ba;
    auto* bounds = app.add_subcommand("bounds", "closed-form net and design bounds");
    bounds->add_option("--d", ba.d, "dimension")->required();
    bounds->add_option("--eps", ba.eps, "net radius in (0, 2]")->required();
    bounds->add_option("--form", ba.form, "delta_max form")
        ->check(CLI::IsMember({"all", "theorem", "kappa", "exponential"}));
    bounds->add_option("--delta", ba.delta, "design error for the gate-count estimate");
    bounds->add_option("--sigma", ba.sigma, "also report lemma bounds at this sigma");
    bounds->add_option("--t", ba.t, "degree for the lemma bounds (default ceil(t_*))");
    bounds->add_option("--eta", ba.eta, "eta (default 1/prod k!)");
    bounds->add_option("--gamma", ba.gamma, "gamma for the trimming bound");
    add_common(bounds, common);

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "evaluate the heat kernel at a torus point");
    kernel->add_option("--d", ka.d, "dimension")->required();
    kernel->add_option("--sigma", ka.sigma, "diffusion time")->required();
    kernel->add_option("--trim-t", ka.trim_t, "trim to one-norm <= 2t (PU only)");
    kernel->add_option("--form", ka.form, "char, poisson, both")
        ->check(CLI::IsMember({"auto", "char", "poisson", "both"}));
    kernel->add_option("--group", ka.group, "su or pu")->check(CLI::IsMember({"su", "pu"}));
    kernel->add_option("--phi", ka.phi, "d-1 torus angles")->delimiter(',')->allow_extra_args();
    kernel->add_option("--tail-tol", ka.tail_tol, "truncation tolerance");
    add_common(kernel, common);

    ValidateOptions vo;
    std::optional<std::size_t> vn;
    auto* validate = app.add_subcommand("validate", "run a validation suite");
    validate->add_option("--suite", vo.suite, "suite name")
        ->check(CLI::IsMember({"trimming", "i0", "outside-ball", "l2", "gue", "orthonormality", "poisson-char",
                               "normalization", "all"}));
    validate->add_option("--d", vo.d, "dimension");
    validate->add_option("--n", vn, "Monte Carlo samples");
    add_common(validate, common);

    DesignArgs da;
    auto* design = app.add_subcommand("design-delta", "design error of a weighted gate set");
    design->add_option("--gateset", da.gateset, "gate set JSON, or builtin:pauli|clifford24|identity")->required();
    design->add_option("--t", da.t, "largest moment order")->required();
    design->add_option("--cap", da.cap, "moment operator dimension cap");
    add_common(design, common);

    std::string sweep_path;
    auto* sweep = app.add_subcommand("sweep", "parameter sweep from a JSON spec");
    sweep->add_option("--spec", sweep_path, "sweep spec JSON")->required();
    add_common(sweep, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "udnet: " << e.what() << '\n';
        if (e.get_exit_code() == 0) return kExitPass;
        return kExitUsage;
    }

    try {
        if (*bounds) {
            resolve_common(common, bounds);
            emit(cmd_bounds(ba, common), common, out);
        } else if (*kernel) {
            resolve_common(common, kernel);
            emit(cmd_kernel(ka, common), common, out);
        } else if (*validate) {
            resolve_common(common, validate);
            check_d(vo.d);
            vo.n = vn;
            vo.seed = common.seed;
            Report r;
            r.command = "validate";
            r.config["suite"] = vo.suite;
            r.config["d"] = vo.d;
            r.config["n"] = vn ? ojson(*vn) : ojson("suite-default");
            echo_common(r.config, common);
            const bool ok = run_validate(vo, r, err);
            emit(r, common, out);
            return ok ? kExitPass : kExitFailure;
        } else if (*design) {
            resolve_common(common, design);
            emit(cmd_design_delta(da, common), common, out);
        } else if (*sweep) {
            resolve_common(common, sweep);
            if (!sweep->count("--format")) common.format = "csv";
            std::ifstream f(sweep_path);
            if (!f) throw InvalidInput("cannot open sweep spec '" + sweep_path + "'");
            ojson spec;
            try {
                f >> spec;
            } catch (const nlohmann::json::exception& e) {
                throw InvalidInput(std::string("malformed sweep spec: ") + e.what());
            }
            Report r = run_sweep(spec);
            r.config["spec"] = sweep_path;
            echo_common(r.config, common);
            emit(r, common, out);
        }
    } catch (const TruncationFailure& e) {
        err << "udnet: truncation failure: " << e.what() << '\n';
        return kExitTruncation;
    } catch (const ResourceLimit& e) {
        err << "udnet: resource limit: " << e.what() << '\n';
        return kExitResource;
    } catch (const NumericalInstability& e) {
        err << "udnet: numerical failure: " << e.what() << '\n';
        return kExitTruncation;
    } catch (const Error& e) {
        err << "udnet: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitPass;
}

}  // namespace udnet::cli
