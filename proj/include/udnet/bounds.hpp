#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "udnet/lie_core.hpp"

namespace udnet {

inline constexpr double kNetC = 9.0 * 3.14159265358979323846;  // C = 9 pi
inline constexpr double kAv = 1.0 / kNetC;                       // a_v = 1/(9 pi)

struct Precondition {
    std::string name;       // e.g. "t-condition"
    std::string condition;  // human-readable inequality
    bool ok = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct BoundReport {
    std::string name;
    std::string citation;
    std::vector<std::pair<std::string, double>> inputs;
    std::vector<Precondition> preconditions;
    // Present only when every precondition holds.
    std::optional<double> log_value;
    // Auxiliary numbers (thresholds, intermediate logs).
    std::vector<std::pair<std::string, double>> extras;

    bool preconditions_ok() const;
    std::optional<double> value() const;
    // Name of the first violated precondition, if any.
    std::optional<std::string> violated() const;
};

// Ungated closed forms, natural log of the right-hand sides.
namespace closed_form {
double log_trim(int d, double sigma, double t, double gamma);
double log_I0(int d, double sigma, double eps);
double log_I0_at_tilde(int d, double sigma, double eps_tilde);
double log_R(int d, double sigma);
double log_outside_ball(int d, double sigma, double t, double eps, double eta);
double log_I00(int d, double sigma);
double log_L2(int d, double sigma, double eta);
double log_L2_simple(int d, double sigma);
double log_L1_trimmed(int d, double sigma, double t);
}  // namespace closed_form

BoundReport bound_trim(int d, double sigma, double t, double gamma = 0.5);
BoundReport bound_I0(int d, double sigma, double eps);
BoundReport bound_R(int d, double sigma);
BoundReport ratio_R_over_I0_ok(int d, double sigma, double eta);
BoundReport bound_outside_ball(int d, double sigma, double t, double eps, double eta);
BoundReport bound_L2(int d, double sigma, double t, std::optional<double> eta = std::nullopt);
BoundReport bound_L2_simple(int d, double sigma);
BoundReport bound_L1_trimmed(int d, double sigma, double t);

// 1 / prod_{k=1}^d k!
Rational eta_min(int d);
double log_eta_min(int d);

// t_* = (d^2 / (2 sqrt(sigma))) sqrt(2 log(d^4/sigma))
double t_star(int d, double sigma);
// Smallest t meeting the trimming-lemma condition for this gamma.
double trim_threshold(int d, double sigma, double gamma);

double theorem1_t_min(int d, double eps);

enum class DeltaForm { theorem, kappa, exponential };
DeltaForm parse_delta_form(const std::string& s);
const char* to_string(DeltaForm f);
// log of the largest admissible delta
double theorem2_log_delta_max(int d, double eps, DeltaForm form);

double log_kappa(int d);
double kappa(int d);
double application1_D();
double application1_ell(int d, double eps, double delta);
double sigma_star(int d, double eps);
// log (a_v kappa_radius)^{d^2-1}
double volume_lower_bound_log(int d, double kappa_radius);

struct AuxCheck {
    std::string name;
    bool passed = true;
    std::size_t cases = 0;
    std::string worst;  // description of the tightest case
};
struct AuxReport {
    std::vector<AuxCheck> checks;
    bool passed() const;
};
AuxReport aux_inequalities_check(int d_max, int trials, std::uint64_t seed);

// Upper incomplete gamma by adaptive Gauss-Kronrod on the defining integral.
double upper_incomplete_gamma_quadrature(double s, double x);

}  // namespace udnet
