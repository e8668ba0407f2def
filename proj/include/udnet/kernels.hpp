#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "udnet/lie_core.hpp"
#include "udnet/weights.hpp"

namespace udnet {

struct KernelParams {
    int d = 2;
    double sigma = 0.1;
    std::optional<int> trim_t;
    double tail_tol = 1e-12;
    std::optional<int> lattice_radius;  // empty = automatic
    std::size_t max_terms = 5'000'000;

    void validate() const;
};

struct EvalResult {
    double value = 0.0;
    double truncation_bound = 0.0;
    std::size_t terms_used = 0;
};

// Plancherel sums reported in log space; they underflow easily.
struct LogEvalResult {
    double log_value = 0.0;
    double log_truncation_bound = 0.0;  // log of the bound on omitted terms
    std::size_t terms_used = 0;
};

// Finite character expansion sum_lambda c_lambda chi_lambda with a bound on
// what was dropped.
class CharacterExpansion {
public:
    CharacterExpansion(int d, std::vector<int> labels, std::vector<double> coeffs, double truncation_bound);

    // Full SU(d) heat kernel, truncated by width lambda_1 (lambda_d = 0 labels).
    static CharacterExpansion su_heat(const KernelParams& p);
    // PU(d) heat kernel; finite when p.trim_t is set.
    static CharacterExpansion pu_heat(const KernelParams& p);

    int d() const { return d_; }
    std::size_t size() const { return coeffs_.size(); }
    std::span<const int> label(std::size_t i) const {
        return {labels_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
    }
    double coeff(std::size_t i) const { return coeffs_[i]; }
    double truncation_bound() const { return truncation_bound_; }

    // Throws NumericalInstability if the imaginary residue exceeds 1e-9.
    EvalResult evaluate(const TorusPoint& x) const;
    // Data-parallel over points (OpenMP).
    std::vector<EvalResult> evaluate_many(std::span<const TorusPoint> xs) const;

private:
    int d_;
    std::vector<int> labels_;
    std::vector<double> coeffs_;
    double truncation_bound_;
    double scale_;  // sum of coeff * dim, the value at the identity
};

EvalResult heat_su_char(const KernelParams& p, const TorusPoint& x);
EvalResult heat_pu_char(const KernelParams& p, const TorusPoint& x);
EvalResult heat_su_poisson(const KernelParams& p, const TorusPoint& x);
EvalResult heat_pu_poisson(const KernelParams& p, const TorusPoint& x);

// Lattice sum without the near-regular switch; x must be regular.
EvalResult heat_su_poisson_direct(const KernelParams& p, const TorusPoint& x);

// sum_{||lambda||_1 > 2t} d_lambda^2 exp(-2 sigma k_lambda) in log space. The
// omitted remainder is below tail_tol * min(1, computed sum).
LogEvalResult trimming_error_sq_log(int d, double sigma, int t, double tail_tol = 1e-12,
                                    std::size_t max_terms = 50'000'000);
EvalResult trimming_error(int d, double sigma, int t, double tail_tol = 1e-12);

// Exact finite Plancherel sum, square-rooted.
double l2_norm_trimmed(int d, double sigma, int t);
EvalResult l2_norm_untrimmed(int d, double sigma, double tail_tol = 1e-12);

// Smallest cutoff L such that sum_{j > L} exp(log_term(j)) < tol, for a
// log-concave term sequence. Returns the cutoff and log of the tail.
struct TailCut {
    long cutoff;
    double log_tail;
};
TailCut tail_cutoff(const std::function<double(long)>& log_term, double tol, long start = 0);
// log sum_{j > L} exp(log_term(j)) for a log-concave sequence.
double log_tail_sum(const std::function<double(long)>& log_term, long L);

// Crude envelope terms used for the truncation schemes.
double log_su_width_term(int d, double sigma, long n);
double log_pu_shell_term(int d, double sigma, long j, double sigma_multiplier);

namespace reference {
std::vector<EvalResult> evaluate_many_serial(const CharacterExpansion& e, std::span<const TorusPoint> xs);
}

}  // namespace udnet
