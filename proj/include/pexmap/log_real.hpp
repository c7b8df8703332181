#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace pexmap {

// Signed magnitude in log scale: x = sign * exp(logmag).
// sign == 0 encodes exact zero (logmag is -inf then).
class LogReal {
public:
    int sign;
    double logmag;

    LogReal() : sign(0), logmag(-std::numeric_limits<double>::infinity()) {}
    LogReal(int s, double lm) : sign(s), logmag(s == 0 ? -std::numeric_limits<double>::infinity() : lm) {}

    static LogReal zero() { return LogReal(); }
    static LogReal one() { return LogReal(1, 0.0); }

    static LogReal from_log(double lm, int s = 1) { return LogReal(s, lm); }

    static LogReal from_value(double v) {
        if (v == 0.0) return zero();
        return LogReal(v > 0 ? 1 : -1, std::log(std::fabs(v)));
    }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(logmag); }
    bool is_zero() const { return sign == 0; }

    LogReal neg() const { return LogReal(-sign, logmag); }
    LogReal abs() const { return LogReal(sign == 0 ? 0 : 1, logmag); }

    // exp(t) * x without leaving log scale
    LogReal scaled(double t) const { return sign == 0 ? zero() : LogReal(sign, logmag + t); }

    friend LogReal operator*(const LogReal& a, const LogReal& b) {
        if (a.sign == 0 || b.sign == 0) return zero();
        return LogReal(a.sign * b.sign, a.logmag + b.logmag);
    }

    friend LogReal operator/(const LogReal& a, const LogReal& b) {
        return LogReal(a.sign * b.sign, a.logmag - b.logmag);
    }

    // Signed addition. Same signs go through log1p(exp(.)), opposite signs through
    // log(-expm1(.)) on the dominated term, both stable near ties.
    friend LogReal operator+(const LogReal& a, const LogReal& b) {
        if (a.sign == 0) return b;
        if (b.sign == 0) return a;
        if (a.sign == b.sign) {
            double hi = a.logmag, lo = b.logmag;
            if (hi < lo) std::swap(hi, lo);
            return LogReal(a.sign, hi + std::log1p(std::exp(lo - hi)));
        }
        if (a.logmag == b.logmag) return zero();
        const LogReal& big = (a.logmag > b.logmag) ? a : b;
        const LogReal& small = (a.logmag > b.logmag) ? b : a;
        double d = small.logmag - big.logmag;  // < 0
        return LogReal(big.sign, big.logmag + std::log(-std::expm1(d)));
    }

    friend LogReal operator-(const LogReal& a, const LogReal& b) { return a + b.neg(); }

    // Comparisons are exact on the (sign, logmag) pair; no exp round trip.
    friend bool operator==(const LogReal& a, const LogReal& b) {
        return a.sign == b.sign && (a.sign == 0 || a.logmag == b.logmag);
    }
    friend bool operator!=(const LogReal& a, const LogReal& b) { return !(a == b); }
    friend bool operator<(const LogReal& a, const LogReal& b) {
        if (a.sign != b.sign) return a.sign < b.sign;
        if (a.sign == 0) return false;
        return a.sign > 0 ? a.logmag < b.logmag : a.logmag > b.logmag;
    }
    friend bool operator>(const LogReal& a, const LogReal& b) { return b < a; }
    friend bool operator<=(const LogReal& a, const LogReal& b) { return !(b < a); }
    friend bool operator>=(const LogReal& a, const LogReal& b) { return !(a < b); }
};

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double hi = a > b ? a : b, lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

inline double log_sum_exp(const std::vector<double>& xs) {
    double acc = -std::numeric_limits<double>::infinity();
    for (double x : xs) acc = log_sum_exp(acc, x);
    return acc;
}

// log(exp(a) - exp(b)) for a > b
inline double log_diff_exp(double a, double b) {
    return a + std::log(-std::expm1(b - a));
}

}  // namespace pexmap
