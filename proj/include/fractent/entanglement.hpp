#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fractent/fit.hpp"
#include "fractent/linalg.hpp"
#include "fractent/su2.hpp"

namespace fractent {

// Reduced density matrix of the leading n-site block, in the block
// orthonormal basis kappa = 0..two_s*n. Hermitian PSD with unit trace.
HermitianMatrix rdm(const WVector& w, int n);

// Von Neumann entropy in bits of a trace-1 PSD matrix (validated to
// 1e-8). Eigenvalues below 1e-14 contribute zero.
double entropy(const HermitianMatrix& rho);

struct EntropyProfile {
    int L = 0;
    std::vector<std::pair<int, double>> points;  // (n, S in bits), ascending n
};

// S(n) for every n in n_set. Basis states short-circuit to the exact
// diagonal spectrum; other states go through rdm + eigenvalues on the
// smaller side of the cut (complementary blocks of a pure state share
// their nonzero spectrum).
EntropyProfile entropy_profile(const WVector& w, const std::vector<int>& n_set, int threads = 1);

std::vector<int> all_cuts(int L);  // n = 1..L-1

struct DfEstimate {
    double d_f = 0.0;
    double s0 = 0.0;
    double max_abs_residual = 0.0;
    std::optional<double> rel_err_vs_target;
};

// Least squares of S against log2(n(L-n)/L); d_f = 2 * slope.
DfEstimate fit_df(const EntropyProfile& profile, std::optional<double> target = std::nullopt);

// Symmetric trim: drop n < L*frac and n > L*(1-frac).
EntropyProfile trim_profile(const EntropyProfile& profile, double frac);

// d_f(k) sequence for inset-style convergence plots.
std::vector<std::pair<int, double>> df_convergence(
    const std::function<EntropyProfile(int)>& run_at_step, const std::vector<int>& k_list);

}  // namespace fractent
