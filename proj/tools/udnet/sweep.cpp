#include <cmath>
#include <exception>
#include <map>
#include <set>

#include "cli.hpp"
#include "udnet/bounds.hpp"
#include "udnet/errors.hpp"
#include "udnet/kernels.hpp"
#include "udnet/montecarlo.hpp"

namespace udnet::cli {

namespace {

struct Point {
    int d = 2;
    double sigma = 0.0, eps = 0.0;
    std::optional<double> t;  // empty = auto
};

struct Target {
    std::set<std::string> axes;
    std::vector<std::pair<std::string, bool>> columns;
};

const std::map<std::string, Target>& targets() {
    static const std::map<std::string, Target> m = {
        {"trimming",
         {{"d", "sigma", "t"},
          {{"log_trimming_error", true}, {"log_bound_trim", true}, {"t_condition", false}, {"holds", false}}}},
        {"delta_max",
         {{"d", "eps"},
          {{"log_delta_max.theorem", true}, {"log_delta_max.kappa", true}, {"log_delta_max.exponential", true}}}},
        {"t_min", {{"d", "eps"}, {{"t_min", true}}}},
        {"i0",
         {{"d", "sigma", "eps"}, {{"log_numeric_I0", true}, {"log_bound_I0", true}, {"sigma_condition", false},
                                  {"holds", false}}}},
        {"l2", {{"d", "sigma", "t"}, {{"l2_norm_trimmed", true}, {"bound_L2_simple", true}, {"holds", false}}}},
        {"outside_ball",
         {{"d", "sigma", "eps", "t"}, {{"log_bound_outside_ball", true}, {"preconditions_ok", false}}}},
    };
    return m;
}

std::vector<double> read_axis(const ojson& spec, const std::string& key, bool allow_auto) {
    const auto& a = spec.at(key);
    if (!a.is_array()) throw InvalidInput("sweep axis '" + key + "' must be an array");
    std::vector<double> v;
    for (const auto& x : a) {
        if (allow_auto && x.is_string() && x.get<std::string>() == "auto") {
            v.push_back(NAN);
        } else if (x.is_number()) {
            v.push_back(x.get<double>());
        } else {
            throw InvalidInput("sweep axis '" + key + "' holds a non-numeric entry");
        }
    }
    return v;
}

Record evaluate(const std::string& target, const Point& p, double gamma, std::optional<double> eta, int grid_n) {
    Record rec;
    rec.integer("d", p.d);
    const auto& axes = targets().at(target).axes;
    if (axes.count("sigma")) rec.input("sigma", p.sigma);
    if (axes.count("eps")) rec.input("eps", p.eps);
    auto auto_t = [&](double fallback) { return p.t ? *p.t : fallback; };
    const double eta_v = eta ? *eta : (p.d <= 20 ? std::exp(log_eta_min(p.d)) : 0.0);

    if (target == "trimming") {
        const double t = auto_t(std::ceil(trim_threshold(p.d, p.sigma, gamma)));
        rec.input("t", t);
        const auto e = trimming_error_sq_log(p.d, p.sigma, static_cast<int>(t));
        const double le = 0.5 * e.log_value;
        const auto b = bound_trim(p.d, p.sigma, t, gamma);
        const double lb = closed_form::log_trim(p.d, p.sigma, t, gamma);
        rec.num("log_trimming_error", le, kPlancherel);
        rec.num("log_bound_trim", lb, kClosedForm);
        rec.flag("t_condition", b.preconditions_ok());
        rec.flag("holds", le <= lb);
    } else if (target == "delta_max") {
        for (auto f : {DeltaForm::theorem, DeltaForm::kappa, DeltaForm::exponential})
            rec.num(std::string("log_delta_max.") + to_string(f), theorem2_log_delta_max(p.d, p.eps, f), kClosedForm);
    } else if (target == "t_min") {
        rec.num("t_min", theorem1_t_min(p.d, p.eps), kClosedForm);
    } else if (target == "i0") {
        const double ln = numeric_I0_log(p.d, p.sigma, p.eps, grid_n);
        const double lb = closed_form::log_I0(p.d, p.sigma, p.eps);
        rec.num("log_numeric_I0", ln, kQuadrature);
        rec.num("log_bound_I0", lb, kClosedForm);
        rec.flag("sigma_condition", bound_I0(p.d, p.sigma, p.eps).preconditions_ok());
        rec.flag("holds", ln <= lb);
    } else if (target == "l2") {
        const double t = auto_t(std::ceil(t_star(p.d, p.sigma)));
        rec.input("t", t);
        const double l2 = l2_norm_trimmed(p.d, p.sigma, static_cast<int>(t));
        const double lb = closed_form::log_L2_simple(p.d, p.sigma);
        rec.num("l2_norm_trimmed", l2, kPlancherel);
        rec.num("bound_L2_simple", std::exp(lb), kClosedForm);
        rec.flag("holds", std::log(l2) <= lb);
    } else if (target == "outside_ball") {
        const double t = auto_t(std::ceil(t_star(p.d, p.sigma)));
        rec.input("t", t);
        rec.num("log_bound_outside_ball", closed_form::log_outside_ball(p.d, p.sigma, t, p.eps, eta_v), kClosedForm);
        rec.flag("preconditions_ok", bound_outside_ball(p.d, p.sigma, t, p.eps, eta_v).preconditions_ok());
    }
    return rec;
}

}  // namespace

Report run_sweep(const ojson& spec) {
    if (!spec.is_object()) throw InvalidInput("sweep spec must be a JSON object");
    static const std::set<std::string> known = {"target", "d", "sigma", "eps", "t", "gamma", "eta", "grid_n"};
    for (const auto& [k, v] : spec.items())
        if (!known.count(k)) throw InvalidInput("unknown sweep spec key '" + k + "'");
    if (!spec.contains("target") || !spec["target"].is_string()) throw InvalidInput("sweep spec needs a string 'target'");
    const std::string target = spec["target"].get<std::string>();
    const auto it = targets().find(target);
    if (it == targets().end()) throw InvalidInput("unknown sweep target '" + target + "'");
    const Target& tg = it->second;

    double gamma = 0.5;
    std::optional<double> eta;
    int grid_n = 256;
    try {
        if (spec.contains("gamma")) gamma = spec["gamma"].get<double>();
        if (spec.contains("eta") && !spec["eta"].is_null()) eta = spec["eta"].get<double>();
        if (spec.contains("grid_n")) grid_n = spec["grid_n"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed sweep spec: ") + e.what());
    }

    std::map<std::string, std::vector<double>> ax;
    for (const auto& name : {"d", "sigma", "eps", "t"}) {
        const bool used = tg.axes.count(name) > 0;
        if (!spec.contains(name)) {
            if (used && std::string(name) != "t") throw InvalidInput("sweep target '" + target + "' needs axis '" + name + "'");
            ax[name] = {NAN};  // unused axis, or t left to its default
            continue;
        }
        if (!used) throw InvalidInput("axis '" + std::string(name) + "' is not used by target '" + target + "'");
        ax[name] = read_axis(spec, name, std::string(name) == "t");
    }

    // validate every axis value before any work
    for (double d : ax["d"])
        if (!(d >= 2 && d <= 20 && d == std::floor(d))) throw InvalidInput("sweep axis d holds " + format_double(d));
    if (tg.axes.count("sigma"))
        for (double s : ax["sigma"])
            if (!(s > 0.0)) throw InvalidInput("sweep axis sigma holds " + format_double(s));
    if (tg.axes.count("eps"))
        for (double e : ax["eps"])
            if (!(e > 0.0 && e <= 2.0)) throw InvalidInput("sweep axis eps holds " + format_double(e) + ", outside (0, 2]");
    for (double t : ax["t"])
        if (!std::isnan(t) && !(t >= 0.0)) throw InvalidInput("sweep axis t holds " + format_double(t));

    std::vector<Point> grid;
    for (double d : ax["d"])
        for (double s : ax["sigma"])
            for (double e : ax["eps"])
                for (double t : ax["t"]) {
                    Point p;
                    p.d = static_cast<int>(d);
                    p.sigma = s;
                    p.eps = e;
                    if (!std::isnan(t)) p.t = t;
                    grid.push_back(p);
                }

    Report r;
    r.command = "sweep";
    r.config["sweep"] = spec;
    r.columns.push_back({"d", false});
    for (const auto& a : {"sigma", "eps"})
        if (tg.axes.count(a)) r.columns.push_back({a, false});
    if (tg.axes.count("t")) r.columns.push_back({"t", false});
    for (const auto& c : tg.columns) r.columns.push_back(c);

    std::vector<Record> rows(grid.size());
    std::vector<std::exception_ptr> errs(grid.size());
    const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            rows[i] = evaluate(target, grid[i], gamma, eta, grid_n);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    }
    for (const auto& e : errs)
        if (e) std::rethrow_exception(e);
    r.rows = std::move(rows);
    return r;
}

}  // namespace udnet::cli
