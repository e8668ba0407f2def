#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace udnet {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// Running sum of signed terms given as (sign, log|x|). The result is kept
// relative to the largest magnitude seen so far.
class SignedLogSum {
public:
    void add(int sign, double log_abs) {
        if (sign == 0 || log_abs == kNegInf) return;
        if (log_abs > scale_) {
            if (scale_ != kNegInf) {
                double f = std::exp(scale_ - log_abs);
                acc_ *= f;
                comp_ *= f;
                abs_acc_ *= f;
            }
            scale_ = log_abs;
        }
        double v = sign * std::exp(log_abs - scale_);
        double y = v - comp_;
        double tsum = acc_ + y;
        comp_ = (tsum - acc_) - y;
        acc_ = tsum;
        abs_acc_ += std::abs(v);
    }
    // value = sign * exp(log_abs)
    double log_abs() const {
        return scale_ == kNegInf || acc_ == 0.0 ? kNegInf : scale_ + std::log(std::abs(acc_));
    }
    int sign() const { return acc_ > 0 ? 1 : (acc_ < 0 ? -1 : 0); }
    double value() const { return scale_ == kNegInf ? 0.0 : acc_ * std::exp(scale_); }
    // log of the sum of |terms|, useful for cancellation diagnostics
    double log_abs_sum() const {
        return scale_ == kNegInf ? kNegInf : scale_ + std::log(abs_acc_);
    }

private:
    double scale_ = kNegInf;
    double acc_ = 0.0;
    double comp_ = 0.0;
    double abs_acc_ = 0.0;
};

// Kahan-compensated accumulator.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace udnet
