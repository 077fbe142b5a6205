#include "fractent/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "fractent/errors.hpp"
#include "fractent/linalg.hpp"

namespace fractent {
namespace oracle {

namespace {
using cd = std::complex<double>;

std::size_t checked_dimension(int L, int local_dim) {
    std::size_t dim = 1;
    for (int j = 0; j < L; ++j) {
        dim *= static_cast<std::size_t>(local_dim);
        if (dim > kMaxAmplitudes)
            throw ResourceError("oracle: state exceeds the amplitude budget");
    }
    return dim;
}

void normalize(DenseState& st, double* pre_norm) {
    double norm_sq = 0.0;
    for (const auto& z : st.amps) norm_sq += std::norm(z);
    const double norm = std::sqrt(norm_sq);
    if (pre_norm) *pre_norm = norm;
    if (norm == 0.0) throw NumericalError("oracle: state annihilated");
    for (auto& z : st.amps) z /= norm;
}

// One application of the global lowering operator: per site, move a
// digit one level down with amplitude `coeff(level)`.
void apply_lowering(DenseState& st, int from_level, int to_level, double coeff,
                    std::vector<cd>& scratch) {
    const int d = st.local_dim;
    const std::size_t dim = st.amps.size();
    scratch.assign(dim, cd(0.0, 0.0));
    std::size_t stride = dim / static_cast<std::size_t>(d);
    for (int site = 0; site < st.L; ++site) {
        for (std::size_t idx = 0; idx < dim; ++idx) {
            const cd amp = st.amps[idx];
            if (amp == cd(0.0, 0.0)) continue;
            const int digit = static_cast<int>((idx / stride) % static_cast<std::size_t>(d));
            if (digit != from_level) continue;
            const std::size_t target = idx + static_cast<std::size_t>(to_level - from_level) * stride;
            scratch[target] += coeff * amp;
        }
        stride /= static_cast<std::size_t>(d);
    }
    st.amps.swap(scratch);
}

}  // namespace

DenseState dense_basis_state(int L, int two_s, int M, double* pre_norm) {
    const int d = two_s + 1;
    const double s = 0.5 * two_s;
    DenseState st{L, d, {}};
    st.amps.assign(checked_dimension(L, d), cd(0.0, 0.0));
    st.amps[0] = 1.0;  // |s s ... s>

    // S_- = sum_j S_{j,-}; one power at a time. S_- |m> has amplitude
    // sqrt(s(s+1) - m(m-1)) on |m-1>, i.e. level i -> i+1.
    std::vector<cd> scratch;
    for (int power = 0; power < M; ++power) {
        const std::size_t dim = st.amps.size();
        scratch.assign(dim, cd(0.0, 0.0));
        std::size_t stride = dim / static_cast<std::size_t>(d);
        for (int site = 0; site < L; ++site) {
            for (std::size_t idx = 0; idx < dim; ++idx) {
                const cd amp = st.amps[idx];
                if (amp == cd(0.0, 0.0)) continue;
                const int level = static_cast<int>((idx / stride) % static_cast<std::size_t>(d));
                if (level == d - 1) continue;
                const double m = s - level;
                const double coeff = std::sqrt(s * (s + 1.0) - m * (m - 1.0));
                scratch[idx + stride] += coeff * amp;
            }
            stride /= static_cast<std::size_t>(d);
        }
        st.amps.swap(scratch);
    }
    normalize(st, pre_norm);
    return st;
}

DenseState dense_basis_state_n(int L, int two_s, std::span<const int> m_levels, double* pre_norm) {
    if (static_cast<int>(m_levels.size()) != two_s)
        throw std::domain_error("dense_basis_state_n: need one M per lowering operator");
    const int d = two_s + 1;
    DenseState st{L, d, {}};
    st.amps.assign(checked_dimension(L, d), cd(0.0, 0.0));
    st.amps[0] = 1.0;  // |1 1 ... 1>

    std::vector<cd> scratch;
    for (int alpha = 1; alpha <= two_s; ++alpha)
        for (int power = 0; power < m_levels[static_cast<std::size_t>(alpha - 1)]; ++power)
            apply_lowering(st, 0, alpha, 1.0, scratch);
    normalize(st, pre_norm);
    return st;
}

DenseState dense_product_state(int L, std::span<const cd> site) {
    const int d = static_cast<int>(site.size());
    DenseState st{L, d, {}};
    checked_dimension(L, d);
    st.amps = {cd(1.0, 0.0)};
    for (int j = 0; j < L; ++j) {
        std::vector<cd> next(st.amps.size() * static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < st.amps.size(); ++i)
            for (int t = 0; t < d; ++t)
                next[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(t)] =
                    st.amps[i] * site[static_cast<std::size_t>(t)];
        st.amps = std::move(next);
    }
    return st;
}

cd dense_overlap(const DenseState& bra, const DenseState& ket) {
    if (bra.amps.size() != ket.amps.size())
        throw std::domain_error("dense_overlap: dimension mismatch");
    cd acc(0.0, 0.0);
    for (std::size_t i = 0; i < bra.amps.size(); ++i) acc += std::conj(bra.amps[i]) * ket.amps[i];
    return acc;
}

double dense_entropy(const DenseState& state, int n) {
    const int L = state.L;
    if (n < 1 || n > L - 1) throw std::domain_error("dense_entropy: need 1 <= n <= L-1");
    std::size_t rows = 1, cols = 1;
    for (int j = 0; j < n; ++j) rows *= static_cast<std::size_t>(state.local_dim);
    for (int j = n; j < L; ++j) cols *= static_cast<std::size_t>(state.local_dim);

    const bool gram_rows = rows <= cols;
    const std::size_t g = gram_rows ? rows : cols;
    HermitianMatrix gram(static_cast<int>(g));
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = i; j < g; ++j) {
            cd acc(0.0, 0.0);
            if (gram_rows) {
                for (std::size_t q = 0; q < cols; ++q)
                    acc += state.amps[i * cols + q] * std::conj(state.amps[j * cols + q]);
            } else {
                for (std::size_t q = 0; q < rows; ++q)
                    acc += state.amps[q * cols + i] * std::conj(state.amps[q * cols + j]);
            }
            gram.set(static_cast<int>(i), static_cast<int>(j), acc);
        }
    }
    double s = 0.0;
    for (double p : hermitian_eigenvalues(gram))
        if (p >= 1e-14) s -= p * std::log2(p);
    return s;
}

}  // namespace oracle
}  // namespace fractent
