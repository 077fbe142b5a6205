#include "fractent/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fractent/errors.hpp"
#include "fractent/parallel.hpp"

namespace fractent {

namespace {

double entropy_bits_from_spectrum(std::span<const double> lambda_sq) {
    double s = 0.0;
    for (double v : lambda_sq)
        if (v >= 1e-14) s -= v * std::log2(v);
    return s;
}

// Index of the only nonzero amplitude, or -1.
int single_support_index(const WVector& w) {
    int idx = -1;
    for (std::size_t m = 0; m < w.amps.size(); ++m) {
        if (w.amps[m] != std::complex<double>(0.0, 0.0)) {
            if (idx >= 0) return -1;
            idx = static_cast<int>(m);
        }
    }
    return idx;
}

}  // namespace

HermitianMatrix rdm(const WVector& w, int n) {
    const int L = w.L;
    const int two_s = w.two_s;
    if (n < 1 || n > L - 1) throw std::domain_error("rdm: need 1 <= n <= L-1");

    const auto table = schmidt_table(L, n, two_s);
    const int d_block = two_s * n + 1;
    const int d_env = two_s * (L - n) + 1;
    const int m_count = two_s * L + 1;

    // Factor A(kappa, q) = w_{kappa+q} lambda(L, n, kappa, kappa+q);
    // rho = A A^dagger.
    std::vector<cdouble> a(static_cast<std::size_t>(d_block) * d_env, cdouble(0.0, 0.0));
    for (int kappa = 0; kappa < d_block; ++kappa) {
        const int q_hi = std::min(d_env, m_count - kappa);
        for (int q = 0; q < q_hi; ++q)
            a[static_cast<std::size_t>(kappa) * d_env + q] =
                w.amps[static_cast<std::size_t>(kappa + q)] * table->at(kappa, kappa + q);
    }

    HermitianMatrix rho(d_block);
    for (int i = 0; i < d_block; ++i) {
        const cdouble* ri = a.data() + static_cast<std::size_t>(i) * d_env;
        for (int j = i; j < d_block; ++j) {
            const cdouble* rj = a.data() + static_cast<std::size_t>(j) * d_env;
            const int len = std::min(d_env, m_count - j);
            cdouble acc(0.0, 0.0);
            for (int q = 0; q < len; ++q) acc += ri[q] * std::conj(rj[q]);
            rho.set(i, j, acc);
        }
    }
    return rho;
}

double entropy(const HermitianMatrix& rho) {
    const double tr = rho.trace();
    if (std::abs(tr - 1.0) > 1e-8) {
        std::ostringstream msg;
        msg << "entropy: trace " << tr << " deviates from 1 beyond 1e-8";
        throw std::domain_error(msg.str());
    }
    const auto eig = hermitian_eigenvalues(rho);
    if (eig.front() < -1e-8) {
        std::ostringstream msg;
        msg << "entropy: matrix not PSD (min eigenvalue " << eig.front() << ")";
        throw std::domain_error(msg.str());
    }
    return entropy_bits_from_spectrum(eig);
}

std::vector<int> all_cuts(int L) {
    std::vector<int> n_set(static_cast<std::size_t>(L - 1));
    for (int n = 1; n < L; ++n) n_set[static_cast<std::size_t>(n - 1)] = n;
    return n_set;
}

EntropyProfile entropy_profile(const WVector& w, const std::vector<int>& n_set, int threads) {
    const int L = w.L;
    const int two_s = w.two_s;
    for (int n : n_set)
        if (n < 1 || n > L - 1) throw std::domain_error("entropy_profile: n outside [1, L-1]");

    const int basis_m = single_support_index(w);

    EntropyProfile profile;
    profile.L = L;
    profile.points.resize(n_set.size());

    parallel_for(static_cast<int>(n_set.size()), threads, [&](int i) {
        const int n = n_set[static_cast<std::size_t>(i)];
        const int block = std::min(n, L - n);
        double s;
        if (basis_m >= 0) {
            // Basis state: rho is diagonal with entries lambda^2.
            const auto table = schmidt_table(L, block, two_s);
            std::vector<double> spec;
            spec.reserve(static_cast<std::size_t>(two_s) * block + 1);
            for (int kappa = 0; kappa <= two_s * block; ++kappa) {
                const double lam = table->at(kappa, basis_m);
                spec.push_back(lam * lam);
            }
            s = entropy_bits_from_spectrum(spec);
        } else {
            s = entropy(rdm(w, block));
        }
        profile.points[static_cast<std::size_t>(i)] = {n, s};
    });

    std::sort(profile.points.begin(), profile.points.end());
    return profile;
}

DfEstimate fit_df(const EntropyProfile& profile, std::optional<double> target) {
    if (profile.points.size() < 10)
        throw std::domain_error("fit_df: need at least 10 profile points");
    const double L = profile.L;
    std::vector<std::pair<double, double>> xy;
    xy.reserve(profile.points.size());
    for (const auto& [n, s] : profile.points)
        xy.emplace_back(std::log2(n * (L - n) / L), s);
    const FitResult fit = linear_fit(xy);

    DfEstimate est;
    est.d_f = 2.0 * fit.slope;
    est.s0 = fit.intercept;
    est.max_abs_residual = fit.max_abs_residual;
    if (target) est.rel_err_vs_target = std::abs(est.d_f - *target) / std::abs(*target);
    return est;
}

EntropyProfile trim_profile(const EntropyProfile& profile, double frac) {
    if (frac < 0.0 || frac >= 0.5) throw std::domain_error("trim_profile: frac must lie in [0, 0.5)");
    EntropyProfile out;
    out.L = profile.L;
    const double lo = profile.L * frac;
    const double hi = profile.L * (1.0 - frac);
    for (const auto& p : profile.points)
        if (p.first >= lo && p.first <= hi) out.points.push_back(p);
    return out;
}

std::vector<std::pair<int, double>> df_convergence(
    const std::function<EntropyProfile(int)>& run_at_step, const std::vector<int>& k_list) {
    for (std::size_t i = 1; i < k_list.size(); ++i)
        if (k_list[i] <= k_list[i - 1])
            throw std::domain_error("df_convergence: k_list must be ascending");
    std::vector<std::pair<int, double>> out;
    out.reserve(k_list.size());
    for (int k : k_list) out.emplace_back(k, fit_df(run_at_step(k)).d_f);
    return out;
}

}  // namespace fractent
