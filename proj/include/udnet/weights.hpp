#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "udnet/lie_core.hpp"

namespace udnet {

// Non-increasing integer label of an SU(d) irrep. Either the zero-sum form
// (projective irreps) or the lambda_d = 0 form is accepted.
class HighestWeight {
public:
    HighestWeight() = default;
    HighestWeight(int d, std::vector<int> lambda);

    int d() const { return static_cast<int>(lambda_.size()); }
    const std::vector<int>& lambda() const { return lambda_; }
    int operator[](int j) const { return lambda_[j]; }
    long one_norm() const;
    long sum() const;
    bool is_projective() const { return sum() == 0; }

    // Zero-sum form; requires d | sum.
    HighestWeight to_zero_sum() const;
    // Shifted so the last entry is 0 (same SU(d) irrep).
    HighestWeight to_su_label() const;

    bool operator==(const HighestWeight& o) const = default;
    auto operator<=>(const HighestWeight& o) const = default;

private:
    std::vector<int> lambda_;
};

// Zero-sum weights with ||lambda||_1 <= 2t in ascending lexicographic order.
std::vector<HighestWeight> enumerate_projective_weights(int d, int t);

// Calls f for each zero-sum weight with ||lambda||_1 == 2s.
void for_each_projective_shell(int d, int s, const std::function<void(const std::vector<int>&)>& f);

// Calls f for each lambda_d = 0 label with lambda_1 == n.
void for_each_su_width(int d, int n, const std::function<void(const std::vector<int>&)>& f);

boost::multiprecision::cpp_int dim(const HighestWeight& w);
double dim_real(std::span<const int> lambda);
double log_dim(std::span<const int> lambda);

Rational casimir(const HighestWeight& w);
double casimir_real(std::span<const int> lambda);

// Evaluates characters at one torus point. Holds per-point scratch (powers of
// the eigenvalues, complete symmetric polynomials) so it is cheap to call for
// many weights; not thread-safe, make one per thread.
class CharacterEvaluator {
public:
    static constexpr double kConfluentGap = 1e-6;

    explicit CharacterEvaluator(const TorusPoint& x);

    // Character of the SU(d) irrep with the given label (any constant shift).
    std::complex<double> operator()(std::span<const int> lambda);
    std::complex<double> operator()(const HighestWeight& w) { return (*this)(w.lambda()); }

    bool confluent() const { return confluent_; }
    std::complex<double> bialternant(std::span<const int> lambda);
    std::complex<double> jacobi_trudi(std::span<const int> lambda);

private:
    void ensure_powers(int p);
    void ensure_h(int k);

    int d_;
    std::vector<double> theta_;
    std::vector<std::complex<double>> z_;
    std::vector<std::vector<std::complex<double>>> pow_;  // pow_[i][p] = z_i^p
    std::vector<std::complex<double>> h_;                 // h_k(z_1..z_d)
    std::complex<double> vandermonde_;
    bool confluent_;
    std::vector<std::complex<double>> scratch_;
    std::vector<int> shifted_;
};

std::complex<double> character(const HighestWeight& w, const TorusPoint& x);

// j = (2i)^m prod_{i<j} sin((theta_i - theta_j)/2)
std::complex<double> j_function(int d, const TorusPoint& x);
// j / i^m, which is real.
double j_real(const TorusPoint& x);

// (1/d) sum_r chi_lambda(gamma_r x) over the center of SU(d).
std::complex<double> center_average_character(const HighestWeight& w, const TorusPoint& x);

// Determinant of a small dense complex matrix (row-major, n x n), LU with
// partial pivoting. The input is overwritten.
std::complex<double> small_det(std::complex<double>* a, int n);

}  // namespace udnet
