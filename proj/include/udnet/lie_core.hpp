#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/rational.hpp>

namespace udnet {

using Rational = boost::rational<std::int64_t>;

struct GroupConstants {
    int d = 0;
    int m = 0;  // positive roots
    int l = 0;  // torus rank
    int N = 0;  // group dimension
    std::int64_t weyl_order = 0;
    int cartan_det = 0;
    Rational weyl_norm_sq;
};

GroupConstants group_constants(int d);

// log(prod_{k=1}^d k!)
double log_superfactorial(int d);

// Natural log of C(d, sigma) / |W|, the Poisson-form prefactor.
double log_prefactor(int d, double sigma);

// Maps an angle into (-pi, pi].
double wrap_angle(double a);

// Point on the maximal torus of SU(d): d-1 free angles, the last eigenphase is
// minus their sum.
class TorusPoint {
public:
    TorusPoint() = default;
    TorusPoint(int d, std::vector<double> phi);

    int d() const { return d_; }
    const std::vector<double>& phi() const { return phi_; }
    double operator[](int j) const { return phi_[j]; }

    // All d eigenphases; the implied last entry is -sum(phi) (not wrapped).
    std::vector<double> eigenphases() const;
    // Smallest circular distance between two eigenphases.
    double min_gap() const;
    bool is_regular() const { return min_gap() > 0.0; }

    // Point multiplied by the central element exp(2 pi i r / d) I.
    TorusPoint center_shift(int r) const;
    TorusPoint negated() const;

    static TorusPoint from_eigenphases(std::span<const double> theta);

private:
    int d_ = 0;
    std::vector<double> phi_;
};

// ||X_phi + X_k||^2 under the Killing form; k empty means k = 0.
double killing_norm_sq(int d, const TorusPoint& x, std::span<const long> k = {});

// 2 arcsin(eps/2)
double eps_tilde(double eps);

void require_dimension(int d);

}  // namespace udnet
