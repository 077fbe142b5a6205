#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fractent/cantor.hpp"
#include "fractent/coefficients.hpp"
#include "fractent/entanglement.hpp"
#include "fractent/linalg.hpp"

namespace fractent {

// Lex-ordered multi-indices (v_1, ..., v_dims) with sum <= budget.
// Rank/unrank through the combinatorial number system.
class SimplexIndexer {
  public:
    SimplexIndexer(int dims, int budget);

    int dims() const { return dims_; }
    int budget() const { return budget_; }
    std::size_t size() const { return size_; }

    std::size_t rank(std::span<const int> v) const;
    void unrank(std::size_t r, std::span<int> out) const;
    bool next(std::span<int> v) const;  // lex successor; false after the last

  private:
    // Number of vectors with `dims_left` coordinates and sum <= budget.
    std::uint64_t count(int dims_left, int budget) const;

    int dims_;
    int budget_;
    std::size_t size_;
    std::vector<std::uint64_t> pascal_;  // C(n, k) for n <= budget + dims
    int pascal_cols_;
};

// State over the SU(2s+1) orthonormal basis |L, M_1..M_2s>, unit norm.
// Amplitudes dense over the simplex sum(M) <= L; dimension C(L+2s, 2s).
struct WTensor {
    int L = 0;
    int two_s = 0;
    std::vector<std::complex<double>> amps;  // indexed by SimplexIndexer(two_s, L)

    SimplexIndexer indexer() const { return SimplexIndexer(two_s, L); }
};

WTensor basis_state_n(int L, int two_s, std::span<const int> m_levels);

// ln of the occupation multinomial: number of site configurations with
// v_alpha sites in level alpha + 1, evaluated as a chain of binomials in
// the log domain. -inf when infeasible.
double log_multinomial(int sites, std::span<const int> v);

// Schmidt coefficient for the SU(2s+1) basis state bipartition.
double schmidt_lambda_n(int L, int n, std::span<const int> k_block, std::span<const int> m_total,
                        int two_s);

// Site coherent vector: embedded (1, alpha+1) rotations applied for
// alpha = 1..2s, each acting as spin-1/2 on its coordinate pair.
// angles = (theta_1, phi_1, ..., theta_2s, phi_2s). Unit norm.
std::vector<std::complex<double>> site_amp_n(int two_s, std::span<const double> angles);

// Full overlap tensor a_{L,M_1..M_2s} by the single-site recursion.
WTensor coherent_amps_n(int L, int two_s, std::span<const double> angles);

// Integer twice the phase exponent: 2 g_alpha(M) = L - sum_{beta<alpha} M_beta - 2 M_alpha.
int phase_exponent_doubled(int L, std::span<const int> m, int alpha);

// One Cantor factor of a decomposable product support, living on the
// phi circle of angular pair `pair` (0-based), either at fixed theta or
// swept as a teepee quadrature.
struct FactorSupport {
    int pair = 0;
    CantorSpec cantor;
    int k = 0;
    CoefficientProfile profile;
    ZeroInjection zeros;
    double theta_fixed = 1.57079632679489661923;
    bool teepee = false;
    double theta_max = 3.14159265358979323846;
    int quadrature_nodes = 64;
};

// Zeros injected into the flattened product support (factor indices in
// row-major order). Realized by subtracting the zeroed points' direct
// contributions from the factorized fast path.
struct ProductZeros {
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
};

// Factorized-coefficient assembly: w_M proportional to the theta
// profile times the product of per-factor phase sums. Verifies the
// phase structure of the coherent overlaps before relying on it.
WTensor assemble_state_n(int L, int two_s, const std::vector<FactorSupport>& factors,
                         const ProductZeros& product_zeros = {});

// Test-only reference: explicit sum over every product support point.
WTensor assemble_state_n_naive(int L, int two_s, const std::vector<FactorSupport>& factors,
                               const ProductZeros& product_zeros = {});

// Reduced density matrix of the leading n-site block over the full
// block simplex (sum k <= n).
HermitianMatrix rdm_n(const WTensor& w, int n);

// S(n) per cut; diagonal fast path for basis states, support-aware
// index reduction before the eigensolve otherwise.
EntropyProfile entropy_profile_n(const WTensor& w, const std::vector<int>& n_set, int threads = 1);

// SO(4) spin-orbital model: the ground space factorizes into two
// spin-1/2 chains, so the entropy is additive.
double so4_entropy(const WVector& ws, const WVector& wt, int n);
EntropyProfile so4_profile(const WVector& ws, const WVector& wt, const std::vector<int>& n_set,
                           int threads = 1);

}  // namespace fractent
