#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "udnet/bounds.hpp"
#include "udnet/errors.hpp"
#include "udnet/kernels.hpp"
#include "udnet/montecarlo.hpp"

using namespace udnet;
using std::numbers::pi;

namespace {
double delta_sq(int d) { return (d * d - 1.0) / 24.0; }
}  // namespace

TEST_CASE("trimming lemma") {
    const double t = trim_threshold(2, 0.1, 0.5);
    const auto r = bound_trim(2, 0.1, t, 0.5);
    REQUIRE(r.preconditions_ok());
    CHECK(*r.value() == doctest::Approx(2 * std::exp(-0.1 * t * t / 4 - 0.05 * t)).epsilon(1e-12));
    const auto below = bound_trim(2, 0.1, 0.9 * t, 0.5);
    CHECK_FALSE(below.log_value);
    CHECK(below.violated() == "t-condition");
    double prev = -1e300;
    for (double g = 0.1; g < 0.99; g += 0.1) {
        const double v = closed_form::log_trim(3, 0.05, 200, g);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("I0 bound") {
    const double et = eps_tilde(0.5);
    const double sigma = et * et / 32;
    const auto r = bound_I0(2, sigma, 0.5);
    REQUIRE(r.preconditions_ok());
    CHECK(*r.log_value == doctest::Approx(std::log(0.5) - 4 + sigma / 8).epsilon(1e-13));
    CHECK_FALSE(bound_I0(2, sigma * 1.01, 0.5).log_value);
    CHECK(closed_form::log_I0(2, 1e-6, 0.5) < -1000);
}

TEST_CASE("R bound") {
    for (int d : {2, 3, 5}) {
        const double sigma = 0.1;
        const int m = d * (d - 1) / 2;
        const double want = log_prefactor(d, sigma) + m * std::log(2.0) + (d - 1) * std::log(2.0) +
                            m * std::log(2 * pi) + m * std::log(1 + d / 2.0) + (m + d - 1) * std::log(2.0) -
                            d * pi * pi / (2 * sigma);
        CHECK(closed_form::log_R(d, sigma) == doctest::Approx(want).epsilon(1e-13));
    }
    const auto r = bound_R(2, 0.1);
    REQUIRE(r.preconditions_ok());
    CHECK(std::isfinite(*r.log_value));
    CHECK(r.preconditions[0].rhs == doctest::Approx(pi * pi));
    CHECK_FALSE(bound_R(2, 10.0).log_value);
    const double s = 0.3, h = 0.15;
    const double diff = closed_form::log_R(2, h) - closed_form::log_R(2, s);
    CHECK(diff == doctest::Approx(-2 * pi * pi / (2 * h) + 2 * pi * pi / (2 * s) + 1.5 * std::log(s / h) +
                                  delta_sq(2) * (h - s))
                      .epsilon(1e-12));
}

TEST_CASE("eta_min and the tail-to-dominant ratio") {
    CHECK(eta_min(2) == Rational(1, 2));
    CHECK(eta_min(3) == Rational(1, 12));
    CHECK(eta_min(4) == Rational(1, 288));
    for (int d = 2; d <= 8; ++d) {
        const double sigma = 1.0 / (d * std::log(d));
        const double eta = std::exp(log_eta_min(d));
        CHECK(ratio_R_over_I0_ok(d, sigma, eta).preconditions_ok());
        CHECK(closed_form::log_R(d, sigma) <= std::log(eta) + closed_form::log_I0_at_tilde(d, sigma, pi));
    }
    CHECK_FALSE(ratio_R_over_I0_ok(2, 2.0, 0.5).preconditions_ok());
    CHECK_FALSE(ratio_R_over_I0_ok(2, 0.1, 0.4).preconditions_ok());
}

TEST_CASE("combined outside-ball bound") {
    const int d = 2;
    const double eps = 0.5, sigma = 1e-3;
    const double t = std::ceil(t_star(d, sigma));
    const auto r = bound_outside_ball(d, sigma, t, eps, 1.0);
    REQUIRE(r.preconditions_ok());
    const double want = 2 * std::exp(-sigma * t * t / 4 - sigma * t / 2) +
                        std::exp(-(d / (16 * sigma)) * eps * eps + delta_sq(d) * sigma);
    CHECK(*r.value() == doctest::Approx(want).epsilon(1e-12));
    double prev = 1e300;
    for (double s = 1e-3; s > 1e-9; s /= 10) {
        const double v = closed_form::log_outside_ball(d, s, std::ceil(t_star(d, s)), eps, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < std::log(1e-15));
    CHECK_FALSE(bound_outside_ball(d, sigma, t / 2, eps, 1.0).log_value);
    CHECK_FALSE(bound_outside_ball(d, sigma, t, eps, 0.1).log_value);
    CHECK_FALSE(bound_outside_ball(d, 0.1, 1e6, eps, 1.0).log_value);
}

TEST_CASE("L2 bounds") {
    CHECK(std::exp(closed_form::log_L2_simple(2, 0.05)) == doctest::Approx(8 * std::pow(40.0, 0.75)));
    CHECK(std::exp(closed_form::log_L2_simple(2, 0.05)) == doctest::Approx(127.2).epsilon(1e-3));
    auto plain = [](int d, double s) { return (d * d - 1.0) / 4.0 * std::log(d / s); };
    CHECK(closed_form::log_L2_simple(11, 0.01) - plain(11, 0.01) == doctest::Approx(std::log(8.0)));
    CHECK(closed_form::log_L2_simple(12, 0.01) - plain(12, 0.01) == doctest::Approx(0.0));
    CHECK(l2_norm_trimmed(2, 0.05, 40) <= std::exp(closed_form::log_L2_simple(2, 0.05)));
    const auto full = bound_L2(2, 0.05, 40);
    REQUIRE(full.log_value);
    CHECK(std::log(l2_norm_trimmed(2, 0.05, 40)) <= *full.log_value);
}

TEST_CASE("L1 bound") {
    const double ts = t_star(2, 0.1);
    CHECK(bound_L1_trimmed(2, 0.1, ts).preconditions_ok());
    CHECK_FALSE(bound_L1_trimmed(2, 0.1, 0.99 * ts).preconditions_ok());
    CHECK(*bound_L1_trimmed(2, 0.1, 100).log_value == doctest::Approx(std::log1p(2 * std::exp(-0.1 * 2500 - 5))));
    double prev = 1e300;
    for (double s = 0.1; s > 1e-8; s /= 10) {
        const double v = closed_form::log_L1_trimmed(3, s, t_star(3, s));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("exact-design order") {
    const double want = 32 * std::pow(2.0, 2.5) / 0.1 * std::log(2.0) * std::log(4 * 9 * pi / 0.1);
    CHECK(theorem1_t_min(2, 0.1) == doctest::Approx(want).epsilon(1e-13));
    CHECK(theorem1_t_min(2, 0.1) == doctest::Approx(8821.8).epsilon(1e-5));
    for (int d = 2; d <= 10; ++d)
        for (double eps = 0.01; eps <= 2.0; eps *= 1.7) {
            CHECK(theorem1_t_min(d, eps / 2) > 2 * theorem1_t_min(d, eps));
            const double scaled =
                theorem1_t_min(d, eps) * eps / (std::pow(d, 2.5) * std::log(d) * std::log(4 / (kAv * eps)));
            CHECK(scaled == doctest::Approx(32.0).epsilon(1e-14));
        }
    CHECK(theorem1_t_min(2, 2.0) > 0);
    CHECK(std::isfinite(theorem1_t_min(2, 2.0)));
}

TEST_CASE("largest admissible delta") {
    using big = boost::multiprecision::cpp_bin_float_50;
    const big c = 9 * boost::math::constants::pi<big>();
    const big eps("0.1");
    const big base = eps / (4 * c * pow(log(2 * c / eps), big(0.25)) * pow(log(big(2)), big(0.25)) * sqrt(big(2)));
    const double want = static_cast<double>(3 * log(base));
    CHECK(theorem2_log_delta_max(2, 0.1, DeltaForm::theorem) == doctest::Approx(want).epsilon(1e-13));
    CHECK(std::exp(want) == doctest::Approx(8.06e-11).epsilon(2e-3));

    for (int d = 2; d <= 12; ++d)
        for (double e = 1e-6; e <= 2.0; e *= 3) {
            const double th = theorem2_log_delta_max(d, e, DeltaForm::theorem);
            CHECK(theorem2_log_delta_max(d, e, DeltaForm::kappa) >= th);
        }
    for (int d = 2; d <= 6; ++d) {
        double prev = -1e300;
        for (double e = 0.1; e >= 1e-6; e /= 2) {
            const double gap = theorem2_log_delta_max(d, e, DeltaForm::theorem) - d * d * std::log(std::pow(e, 1.5) / d);
            CHECK(gap > prev);
            prev = gap;
        }
    }
    CHECK_THROWS_AS(parse_delta_form("loose"), InvalidParameter);
    CHECK(parse_delta_form("kappa") == DeltaForm::kappa);
}

TEST_CASE("kappa") {
    const double expo = 4.0 / 16 - 17.0 / 4 - 2 / (768 * std::log(2.0) * std::log(2.0) * std::log(9 * pi));
    CHECK(expo == doctest::Approx(-4.0016).epsilon(1e-4));
    CHECK(kappa(2) == doctest::Approx(std::pow(2.0, expo)).epsilon(1e-13));
    CHECK(kappa(2) == doctest::Approx(0.0624).epsilon(2e-3));
    double prev = 0;
    for (int d = 2; d <= 20; ++d) {
        CHECK(-log_kappa(d) < 5);
        if (d >= 9) CHECK(-log_kappa(d) < 0);
        const double root = log_kappa(d) / (d * d - 1.0);
        CHECK(root >= -1.5 * std::log(2.0));
        if (d > 2) CHECK(root > prev);
        prev = root;
    }
}

TEST_CASE("gate-count lower bound") {
    const double D = 8 * std::pow(9 * pi, 2.0 / 3) * std::cbrt(std::log(18 * pi));
    CHECK(application1_D() == doctest::Approx(D));
    const double num = -log_kappa(2) + 3 * (1.25 * std::log(10.0) + 0.75 * std::log(2 * D));
    CHECK(application1_ell(2, 0.1, 1e-12) == doctest::Approx(num / (12 * std::log(10.0))).epsilon(1e-13));
    const double a = application1_ell(3, 0.2, 1e-3) * std::log(1e3);
    const double b = application1_ell(3, 0.1, 1e-3) * std::log(1e3);
    CHECK(b - a == doctest::Approx(8 * 1.25 * std::log(2.0)).epsilon(1e-12));
    CHECK(application1_ell(2, 0.1, 1e-300) < application1_ell(2, 0.1, 1e-12));
    CHECK_THROWS_AS(application1_ell(2, 0.1, 1.0), InvalidParameter);
}

TEST_CASE("projective ball volume") {
    CHECK(std::exp(volume_lower_bound_log(2, 0.05)) == doctest::Approx(std::pow(0.05 / (9 * pi), 3)));
    CHECK(std::exp(volume_lower_bound_log(2, 0.05)) == doctest::Approx(5.54e-9).epsilon(2e-3));
    const double s = (volume_lower_bound_log(4, 0.01) - volume_lower_bound_log(4, 0.1)) / std::log(0.1);
    CHECK(s == doctest::Approx(15.0));
    CHECK_THROWS_AS(volume_lower_bound_log(2, 0.0), InvalidParameter);
}

TEST_CASE("auxiliary inequalities") {
    const auto r = aux_inequalities_check(8, 300, 11);
    for (const auto& c : r.checks) {
        INFO(c.name << " " << c.worst);
        CHECK(c.passed);
        CHECK(c.cases > 0);
    }
    CHECK(r.passed());
    for (double x : {0.3, 2.0, 9.0}) CHECK(upper_incomplete_gamma_quadrature(1.0, x) == doctest::Approx(std::exp(-x)));
    for (double s : {1.5, 3.0, 7.2})
        for (double x : {s, 2 * s + 1}) {
            CHECK(upper_incomplete_gamma_quadrature(s, x) ==
                  doctest::Approx(boost::math::tgamma(s, x)).epsilon(1e-10));
            CHECK(boost::math::tgamma(s, x) <= std::exp(-x) * std::pow(x, s) / (x - s + 1));
        }
    // d = 4 case of the factorial-product inequality
    CHECK(std::pow(1.0, -2.0) >= std::exp(log_eta_min(4)));
    CHECK(std::exp(log_eta_min(4)) == doctest::Approx(1.0 / 288));
}

TEST_CASE("dominance chain on a parameter grid") {
    for (int d : {2, 3}) {
        for (int i = 0; i < 20; ++i) {
            const double sigma = 1.0 / (d * std::log(d)) * std::pow(10.0, -2.5 * i / 19.0);
            const double t = std::ceil(trim_threshold(d, sigma, 0.5));
            const auto bt = bound_trim(d, sigma, t, 0.5);
            REQUIRE(bt.log_value);
            CHECK(0.5 * trimming_error_sq_log(d, sigma, static_cast<int>(t)).log_value <= *bt.log_value);
            const double eta = std::exp(log_eta_min(d));
            CHECK(closed_form::log_R(d, sigma) <= std::log(eta) + closed_form::log_I0_at_tilde(d, sigma, pi));
            const auto l2 = bound_L2_simple(d, sigma);
            REQUIRE(l2.log_value);
            const int ts = static_cast<int>(std::ceil(t_star(d, sigma)));
            if (d == 2 || ts <= 200) CHECK(std::log(l2_norm_trimmed(d, sigma, ts)) <= *l2.log_value);
        }
        for (int i = 0; i < 20; ++i) {
            const double eps = 0.1 + 1.9 * i / 19.0;
            const double et = eps_tilde(eps);
            for (int j = 0; j < 20; ++j) {
                const double sigma = et * et / 32.0 * std::pow(10.0, -1.5 * j / 19.0);
                const auto b = bound_I0(d, sigma, eps);
                REQUIRE(b.log_value);
                CHECK(numeric_I0_log(d, sigma, eps, d == 2 ? 256 : 48) <= *b.log_value);
            }
        }
    }
}
