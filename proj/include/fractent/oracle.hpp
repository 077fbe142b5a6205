#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fractent {

// Brute-force reference on the full (2s+1)^L Hilbert space. Nothing in
// here reuses the Schmidt-table pipeline: lowering operators are applied
// explicitly and entropies come from a Gram matrix of the reshaped
// amplitude vector.
namespace oracle {

struct DenseState {
    int L = 0;
    int local_dim = 0;
    std::vector<std::complex<double>> amps;  // site 0 is the most significant digit
};

inline constexpr std::size_t kMaxAmplitudes = 10'000'000;

// |L, M> = S_-^M |s...s> / (M! nu). Site levels are ordered m = s..-s.
// pre_norm, when given, receives ||S_-^M |s...s>|| before normalization.
DenseState dense_basis_state(int L, int two_s, int M, double* pre_norm = nullptr);

// SU(2s+1): prod_alpha F_alpha^{M_alpha} |1...1>, normalized; levels are
// 0..2s with F_alpha mapping level 0 to level alpha.
DenseState dense_basis_state_n(int L, int two_s, std::span<const int> m_levels,
                               double* pre_norm = nullptr);

// Kronecker power of one site vector.
DenseState dense_product_state(int L, std::span<const std::complex<double>> site);

std::complex<double> dense_overlap(const DenseState& bra, const DenseState& ket);

// Entropy in bits across the cut after the first n sites: reshape,
// Gram matrix on the smaller side, eigenvalues, -sum p log2 p.
double dense_entropy(const DenseState& state, int n);

}  // namespace oracle
}  // namespace fractent
