#include "udnet/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "udnet/errors.hpp"
#include "udnet/logmath.hpp"

namespace udnet {

HighestWeight::HighestWeight(int d, std::vector<int> lambda) : lambda_(std::move(lambda)) {
    require_dimension(d);
    if (static_cast<int>(lambda_.size()) != d)
        throw InvalidParameter("highest weight needs d = " + std::to_string(d) + " entries");
    for (int i = 0; i + 1 < d; ++i)
        if (lambda_[i] < lambda_[i + 1]) throw InvalidParameter("highest weight must be non-increasing");
}

long HighestWeight::one_norm() const {
    long s = 0;
    for (int v : lambda_) s += std::abs(v);
    return s;
}

long HighestWeight::sum() const {
    return std::accumulate(lambda_.begin(), lambda_.end(), 0L);
}

HighestWeight HighestWeight::to_zero_sum() const {
    const long s = sum();
    const int dd = d();
    if (s % dd != 0)
        throw InvalidParameter("label is not projective: d = " + std::to_string(dd) +
                               " does not divide sum = " + std::to_string(s));
    std::vector<int> out(lambda_);
    for (int& v : out) v -= static_cast<int>(s / dd);
    return HighestWeight(dd, std::move(out));
}

HighestWeight HighestWeight::to_su_label() const {
    std::vector<int> out(lambda_);
    const int last = out.back();
    for (int& v : out) v -= last;
    return HighestWeight(d(), std::move(out));
}

namespace {

// Partitions of n into at most k parts, each <= cap, non-increasing.
void partitions(int n, int k, int cap, std::vector<int>& cur,
                const std::function<void(const std::vector<int>&)>& f) {
    if (n == 0) {
        f(cur);
        return;
    }
    if (k == 0) return;
    for (int p = std::min(n, cap); p >= 1; --p) {
        if (static_cast<long>(p) * k < n) break;
        cur.push_back(p);
        partitions(n - p, k - 1, p, cur, f);
        cur.pop_back();
    }
}

}  // namespace

void for_each_projective_shell(int d, int s, const std::function<void(const std::vector<int>&)>& f) {
    require_dimension(d);
    std::vector<int> lam(d);
    if (s == 0) {
        std::fill(lam.begin(), lam.end(), 0);
        f(lam);
        return;
    }
    std::vector<int> mu, nu;
    partitions(s, d - 1, s, mu, [&](const std::vector<int>& pos) {
        const int p = static_cast<int>(pos.size());
        partitions(s, d - p, s, nu, [&](const std::vector<int>& neg) {
            const int q = static_cast<int>(neg.size());
            std::fill(lam.begin(), lam.end(), 0);
            for (int i = 0; i < p; ++i) lam[i] = pos[i];
            for (int i = 0; i < q; ++i) lam[d - 1 - i] = -neg[i];
            f(lam);
        });
    });
}

std::vector<HighestWeight> enumerate_projective_weights(int d, int t) {
    require_dimension(d);
    if (t < 0) throw InvalidParameter("t must be non-negative");
    std::vector<HighestWeight> out;
    for (int s = 0; s <= t; ++s)
        for_each_projective_shell(d, s, [&](const std::vector<int>& lam) { out.emplace_back(d, lam); });
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void su_middle(int d, int pos, int cap, std::vector<int>& lam,
               const std::function<void(const std::vector<int>&)>& f) {
    if (pos == d - 1) {
        f(lam);
        return;
    }
    for (int v = cap; v >= 0; --v) {
        lam[pos] = v;
        su_middle(d, pos + 1, v, lam, f);
    }
}

}  // namespace

void for_each_su_width(int d, int n, const std::function<void(const std::vector<int>&)>& f) {
    require_dimension(d);
    std::vector<int> lam(d, 0);
    lam[0] = n;
    if (d == 2) {
        f(lam);
        return;
    }
    su_middle(d, 1, n, lam, f);
}

boost::multiprecision::cpp_int dim(const HighestWeight& w) {
    using boost::multiprecision::cpp_int;
    const int d = w.d();
    cpp_int num = 1, den = 1;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            num *= static_cast<long>(w[i]) - w[j] + (j - i);
            den *= (j - i);
        }
    return num / den;
}

double dim_real(std::span<const int> lam) {
    const int d = static_cast<int>(lam.size());
    double r = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) r *= static_cast<double>(lam[i] - lam[j] + (j - i)) / (j - i);
    return r;
}

double log_dim(std::span<const int> lam) {
    const int d = static_cast<int>(lam.size());
    double r = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            r += std::log(static_cast<double>(lam[i] - lam[j] + (j - i))) - std::log(static_cast<double>(j - i));
    return r;
}

Rational casimir(const HighestWeight& w) {
    const std::int64_t d = w.d();
    std::int64_t a = 0, s = 0;
    for (std::int64_t j = 1; j <= d; ++j) {
        const std::int64_t l = w[static_cast<int>(j - 1)];
        a += l * l + (d - 2 * j + 1) * l;
        s += l;
    }
    return Rational(a, 2 * d) - Rational(s * s, 2 * d * d);
}

double casimir_real(std::span<const int> lam) {
    const int d = static_cast<int>(lam.size());
    double a = 0.0, s = 0.0;
    for (int j = 1; j <= d; ++j) {
        const double l = lam[j - 1];
        a += l * l + (d - 2 * j + 1) * l;
        s += l;
    }
    return a / (2.0 * d) - s * s / (2.0 * d * d);
}

std::complex<double> small_det(std::complex<double>* a, int n) {
    std::complex<double> det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        double best = std::abs(a[c * n + c]);
        for (int r = c + 1; r < n; ++r) {
            double v = std::abs(a[r * n + c]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            det = -det;
        }
        const std::complex<double> p = a[c * n + c];
        det *= p;
        for (int r = c + 1; r < n; ++r) {
            const std::complex<double> f = a[r * n + c] / p;
            if (f == 0.0) continue;
            for (int k = c + 1; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
        }
    }
    return det;
}

CharacterEvaluator::CharacterEvaluator(const TorusPoint& x)
    : d_(x.d()), theta_(x.eigenphases()), z_(d_), pow_(d_), vandermonde_(1.0) {
    for (int i = 0; i < d_; ++i) {
        z_[i] = std::polar(1.0, theta_[i]);
        pow_[i].push_back(1.0);
    }
    for (int i = 0; i < d_; ++i)
        for (int j = i + 1; j < d_; ++j)
            vandermonde_ *= std::polar(2.0 * std::sin((theta_[i] - theta_[j]) / 2), (theta_[i] + theta_[j]) / 2) *
                            std::complex<double>(0.0, 1.0);
    confluent_ = x.min_gap() < kConfluentGap;
    scratch_.resize(static_cast<std::size_t>(d_) * d_);
    shifted_.resize(d_);
}

void CharacterEvaluator::ensure_powers(int p) {
    for (int i = 0; i < d_; ++i) {
        auto& pw = pow_[i];
        while (static_cast<int>(pw.size()) <= p) {
            const int q = static_cast<int>(pw.size());
            pw.push_back(q % 64 == 0 ? std::polar(1.0, q * theta_[i]) : pw.back() * z_[i]);
        }
    }
}

void CharacterEvaluator::ensure_h(int k) {
    if (static_cast<int>(h_.size()) > k) return;
    const int K = std::max(k + 1, 2 * static_cast<int>(h_.size()));
    ensure_powers(K);
    // h_k(z_1..z_j) = h_k(z_1..z_{j-1}) + z_j h_{k-1}(z_1..z_j)
    std::vector<std::complex<double>> h(pow_[0].begin(), pow_[0].begin() + K);
    for (int j = 1; j < d_; ++j)
        for (int q = 1; q < K; ++q) h[q] += z_[j] * h[q - 1];
    h_ = std::move(h);
}

std::complex<double> CharacterEvaluator::bialternant(std::span<const int> lam) {
    const int d = d_;
    const int last = lam[d - 1];
    ensure_powers(lam[0] - last + d - 1);
    for (int j = 0; j < d; ++j) {
        const int e = lam[j] - last + (d - 1 - j);
        for (int i = 0; i < d; ++i) scratch_[i * d + j] = pow_[i][e];
    }
    std::complex<double> num;
    if (d == 2) {
        num = scratch_[0] * scratch_[3] - scratch_[1] * scratch_[2];
    } else {
        num = small_det(scratch_.data(), d);
    }
    return num / vandermonde_;
}

std::complex<double> CharacterEvaluator::jacobi_trudi(std::span<const int> lam) {
    const int d = d_;
    const int r = d - 1;
    const int last = lam[d - 1];
    for (int i = 0; i < d; ++i) shifted_[i] = lam[i] - last;
    ensure_h(shifted_[0] + r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const int k = shifted_[i] - i + j;
            scratch_[i * r + j] = k < 0 ? std::complex<double>(0.0) : h_[k];
        }
    if (r == 1) return scratch_[0];
    return small_det(scratch_.data(), r);
}

std::complex<double> CharacterEvaluator::operator()(std::span<const int> lam) {
    if (static_cast<int>(lam.size()) != d_) throw InvalidParameter("weight and torus point dimension differ");
    // constant labels are the trivial representation
    if (std::adjacent_find(lam.begin(), lam.end(), std::not_equal_to<>()) == lam.end()) return 1.0;
    return confluent_ ? jacobi_trudi(lam) : bialternant(lam);
}

std::complex<double> character(const HighestWeight& w, const TorusPoint& x) {
    CharacterEvaluator ev(x);
    return ev(w);
}

double j_real(const TorusPoint& x) {
    const auto th = x.eigenphases();
    const int d = x.d();
    double r = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) r *= 2.0 * std::sin((th[i] - th[j]) / 2);
    return r;
}

std::complex<double> j_function(int d, const TorusPoint& x) {
    if (x.d() != d) throw InvalidParameter("torus point dimension mismatch");
    const int m = d * (d - 1) / 2;
    static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return ipow[m % 4] * j_real(x);
}

std::complex<double> center_average_character(const HighestWeight& w, const TorusPoint& x) {
    const int d = x.d();
    std::complex<double> s = 0.0;
    for (int r = 0; r < d; ++r) s += character(w, x.center_shift(r));
    return s / static_cast<double>(d);
}

}  // namespace udnet
