#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace fractent {

// A real number stored as (sign, ln|x|). Binomial-scale intermediates
// (nu, Z(L,M), multinomials) overflow double long before L reaches
// figure scale, so all such magnitudes live in this representation.
struct SignedLog {
    int sign = 0;          // -1, 0, +1; sign == 0 is exact zero
    double logmag = 0.0;   // ln|x|; ignored when sign == 0

    static SignedLog zero() { return {}; }

    static SignedLog from_log(int sign, double logmag) {
        if (sign == 0) return {};
        return {sign > 0 ? 1 : -1, logmag};
    }

    static SignedLog from_double(double x) {
        if (x == 0.0) return {};
        return {x > 0.0 ? 1 : -1, std::log(std::abs(x))};
    }

    double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(logmag); }
    bool is_zero() const { return sign == 0; }
};

inline SignedLog operator*(SignedLog a, SignedLog b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.logmag + b.logmag};
}

inline SignedLog operator/(SignedLog a, SignedLog b) {
    if (b.sign == 0) throw std::domain_error("SignedLog: division by zero");
    if (a.sign == 0) return {};
    return {a.sign * b.sign, a.logmag - b.logmag};
}

// sqrt of a nonnegative value.
SignedLog slog_sqrt(SignedLog a);

// Exact-real sum of the terms, evaluated by factoring out the largest
// magnitude (log-sum-exp with sign bookkeeping). Cancellation below
// 1e-300 of the dominant magnitude collapses to exact zero.
SignedLog slog_sum(std::span<const SignedLog> terms);

// ln n! via an exact summation table (not Stirling), lazily grown.
double log_factorial(int n);

// ln C(n, k). Throws std::domain_error when k > n or either is negative.
double log_binomial(int n, int k);

}  // namespace fractent
