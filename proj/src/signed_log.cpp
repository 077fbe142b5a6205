#include "fractent/signed_log.hpp"

#include <algorithm>
#include <stdexcept>

namespace fractent {

SignedLog slog_sqrt(SignedLog a) {
    if (a.sign == 0) return {};
    if (a.sign < 0) throw std::domain_error("slog_sqrt: negative argument");
    return {1, 0.5 * a.logmag};
}

SignedLog slog_sum(std::span<const SignedLog> terms) {
    double maxlog = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms)
        if (t.sign != 0) maxlog = std::max(maxlog, t.logmag);
    if (!std::isfinite(maxlog)) return {};

    double acc = 0.0;
    for (const auto& t : terms)
        if (t.sign != 0) acc += t.sign * std::exp(t.logmag - maxlog);

    if (std::abs(acc) < 1e-300) return {};
    return {acc > 0.0 ? 1 : -1, maxlog + std::log(std::abs(acc))};
}

double log_factorial(int n) {
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    // Grown thread-locally: no locking on the hot path, identical values
    // in every thread.
    thread_local std::vector<double> table{0.0, 0.0};  // ln 0!, ln 1!
    while (static_cast<int>(table.size()) <= n) {
        const auto m = static_cast<double>(table.size());
        table.push_back(table.back() + std::log(m));
    }
    return table[static_cast<std::size_t>(n)];
}

double log_binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace fractent
