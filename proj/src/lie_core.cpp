#include "udnet/lie_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "udnet/errors.hpp"
#include "udnet/logmath.hpp"

namespace udnet {

void require_dimension(int d) {
    if (d < 2) throw InvalidDimension("d must be >= 2, got " + std::to_string(d));
}

GroupConstants group_constants(int d) {
    require_dimension(d);
    if (d > 20) throw InvalidDimension("d must be <= 20 for exact constants, got " + std::to_string(d));
    GroupConstants g;
    g.d = d;
    g.m = d * (d - 1) / 2;
    g.l = d - 1;
    g.N = d * d - 1;
    g.weyl_order = 1;
    for (int k = 2; k <= d; ++k) g.weyl_order *= k;
    g.cartan_det = d;
    g.weyl_norm_sq = Rational(static_cast<std::int64_t>(d) * d - 1, 24);
    return g;
}

double log_superfactorial(int d) {
    double s = 0.0;
    for (int k = 1; k <= d; ++k) s += std::lgamma(k + 1.0);
    return s;
}

double log_prefactor(int d, double sigma) {
    require_dimension(d);
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InvalidParameter("sigma must be a positive finite number");
    const double dd = d;
    const double m = dd * (dd - 1) / 2;
    const double n = dd * dd - 1;
    return 0.5 * std::log(dd) + ((dd - 1) / 2 + m) * std::log(2 * dd) - log_superfactorial(d) +
           (dd - 1 + m) * std::log(2 * kPi) + n * sigma / 24.0 - (n / 2) * std::log(4 * kPi * sigma);
}

double wrap_angle(double a) {
    double r = std::remainder(a, 2 * kPi);  // in [-pi, pi]
    if (r <= -kPi) r += 2 * kPi;
    return r;
}

TorusPoint::TorusPoint(int d, std::vector<double> phi) : d_(d), phi_(std::move(phi)) {
    require_dimension(d);
    if (static_cast<int>(phi_.size()) != d - 1)
        throw InvalidParameter("torus point needs d-1 = " + std::to_string(d - 1) + " angles, got " +
                               std::to_string(phi_.size()));
    for (double& a : phi_) {
        if (!std::isfinite(a)) throw InvalidParameter("torus angles must be finite");
        a = wrap_angle(a);
    }
}

std::vector<double> TorusPoint::eigenphases() const {
    std::vector<double> th(phi_);
    th.push_back(-std::accumulate(phi_.begin(), phi_.end(), 0.0));
    return th;
}

double TorusPoint::min_gap() const {
    auto th = eigenphases();
    double g = 2 * kPi;
    for (int i = 0; i < d_; ++i)
        for (int j = i + 1; j < d_; ++j) g = std::min(g, std::abs(wrap_angle(th[i] - th[j])));
    return g;
}

TorusPoint TorusPoint::center_shift(int r) const {
    std::vector<double> p(phi_);
    for (double& a : p) a += 2 * kPi * r / d_;
    return TorusPoint(d_, std::move(p));
}

TorusPoint TorusPoint::negated() const {
    std::vector<double> p(phi_);
    for (double& a : p) a = -a;
    return TorusPoint(d_, std::move(p));
}

TorusPoint TorusPoint::from_eigenphases(std::span<const double> theta) {
    const int d = static_cast<int>(theta.size());
    require_dimension(d);
    return TorusPoint(d, std::vector<double>(theta.begin(), theta.end() - 1));
}

double killing_norm_sq(int d, const TorusPoint& x, std::span<const long> k) {
    if (x.d() != d) throw InvalidParameter("torus point dimension mismatch");
    if (!k.empty() && static_cast<int>(k.size()) != d - 1)
        throw InvalidParameter("lattice vector needs d-1 entries");
    double sq = 0.0, sum = 0.0;
    for (int j = 0; j < d - 1; ++j) {
        double psi = x[j] + (k.empty() ? 0.0 : 2 * kPi * static_cast<double>(k[j]));
        sq += psi * psi;
        sum += psi;
    }
    return 2.0 * d * (sq + sum * sum);
}

double eps_tilde(double eps) {
    if (!(eps > 0.0 && eps <= 2.0)) throw InvalidParameter("eps must lie in (0, 2]");
    return 2.0 * std::asin(eps / 2.0);
}

}  // namespace udnet
