#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "fractent/cantor.hpp"
#include "fractent/coefficients.hpp"
#include "fractent/signed_log.hpp"

namespace fractent {

// Spin is carried around as two_s = 2s (so s = 1/2, 1, 3/2, 2 are 1..4).

// epsilon(s, u) from the constrained-sum weights; u is passed doubled
// (two_u in {-two_s, -two_s + 2, ..., two_s - 2}).
double epsilon_weight(int two_s, int two_u);

// nu(L, M) for spin s: sqrt of the constrained occupation sum. The
// square obeys the per-site convolution
//   nu^2(l, M) = sum_kappa nu^2(1, kappa) nu^2(l - 1, M - kappa),
// with nu^2(1, kappa) = epsilon(s, s - kappa), which is how the table
// is filled (state = (sites consumed, lowering weight consumed), all
// arithmetic in the log domain).
SignedLog nu(int sites, int m_weight, int two_s);

// ln nu^2(l, M) for every l <= sites, cached per (two_s, sites).
// Column l has two_s * l + 1 entries.
class NuTable {
  public:
    NuTable(int two_s, int sites);
    double log_nu_sq(int l, int m_weight) const;       // -inf outside [0, two_s*l]
    int two_s() const { return two_s_; }
    int sites() const { return sites_; }

  private:
    int two_s_;
    int sites_;
    std::vector<std::vector<double>> columns_;
};

std::shared_ptr<const NuTable> nu_table(int two_s, int sites);

// lambda(L, n, kappa, M) = mu / nu with mu^2 = nu_block^2 * nu_env^2.
// Plain double return; Schmidt coefficients are O(1).
double schmidt_lambda(int L, int n, int kappa, int M, int two_s);

// Dense lambda table over kappa in [0, two_s*n], M in [0, two_s*L].
struct SchmidtTable {
    int L, n, two_s;
    int kappa_count, m_count;
    std::vector<double> lam;  // lam[kappa * m_count + M]
    double at(int kappa, int M) const { return lam[static_cast<std::size_t>(kappa) * m_count + M]; }
};

// Bounded cache keyed by (two_s, L, n); concurrent lookups share entries.
std::shared_ptr<const SchmidtTable> schmidt_table(int L, int n, int two_s);

// Site coherent vector exp(i phi S^z) exp(i theta S^y) |s>, component
// order m = s, s-1, ..., -s. Unit norm.
std::vector<std::complex<double>> site_amp(int two_s, double theta, double phi);

// Full overlap vector a_{LM} = <L,M|psi(theta,phi)>, M = 0..two_s*L,
// via the single-site Schmidt recursion. Unit norm.
std::vector<std::complex<double>> coherent_amps(int L, int two_s, double theta, double phi);

// Phase sums P_m = sum_g c_g e^{i phi_g (t_start + m t_step)} over a
// Cantor support mapped onto the phi circle, for m = 0..count-1,
// without materializing the support. Equal coefficients on the Spread
// pattern factorize exactly over construction levels; other profiles
// stream the points (Spread only beyond the materialization budget).
std::vector<std::complex<double>> cantor_phase_sums(const CantorSpec& spec, int k,
                                                    const CoefficientProfile& profile,
                                                    const ZeroInjection& zeros, double t_start,
                                                    double t_step, int count, int threads = 1,
                                                    std::uint64_t materialize_budget =
                                                        std::uint64_t{1} << 24);

// Degenerate ground state in the orthonormal basis, unit 2-norm.
struct WVector {
    int L = 0;
    int two_s = 0;
    std::vector<std::complex<double>> amps;  // indexed by M
};

WVector basis_state(int L, int two_s, int M);  // w = e_M

// Core assemblers. Coefficients are per support point; the phi variants
// share the phase sum sum_g c_g e^{i phi_g (sL - M)} across M.
WVector assemble_phi_points(int L, int two_s, std::span<const double> phis,
                            std::span<const std::complex<double>> coeffs, double theta_fixed);
WVector assemble_theta_points(int L, int two_s, std::span<const double> thetas,
                              std::span<const std::complex<double>> coeffs, double phi_fixed);
WVector assemble_teepee_points(int L, int two_s, std::span<const double> phis,
                               std::span<const std::complex<double>> coeffs,
                               const Quadrature& quad);

// Support descriptor driven assembly (Cantor set on one axis, or teepee).
struct SupportSpec {
    enum class Kind { CantorPhi, CantorTheta, Teepee } kind = Kind::CantorPhi;
    CantorSpec cantor;
    int k = 0;
    double fixed_angle = 1.57079632679489661923;  // theta for CantorPhi, phi for CantorTheta
    double theta_max = 3.14159265358979323846;    // teepee apex extent
    int quadrature_nodes = 64;
};

WVector assemble_state(int L, int two_s, const SupportSpec& support,
                       const CoefficientProfile& profile, const ZeroInjection& zeros,
                       int threads = 1);

}  // namespace fractent
