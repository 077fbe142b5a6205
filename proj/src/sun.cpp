#include "fractent/sun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fractent/errors.hpp"
#include "fractent/parallel.hpp"
#include "fractent/rng.hpp"
#include "fractent/signed_log.hpp"

namespace fractent {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
using cd = std::complex<double>;
}  // namespace

SimplexIndexer::SimplexIndexer(int dims, int budget) : dims_(dims), budget_(budget) {
    if (dims < 1 || budget < 0) throw std::domain_error("SimplexIndexer: bad arguments");
    const int rows = budget + dims + 1;
    pascal_cols_ = dims + 1;
    if (static_cast<long long>(rows) * pascal_cols_ > 64 * 1000 * 1000)
        throw ResourceError("SimplexIndexer: index table too large");
    pascal_.assign(static_cast<std::size_t>(rows) * pascal_cols_, 0);
    for (int n = 0; n < rows; ++n) {
        pascal_[static_cast<std::size_t>(n) * pascal_cols_] = 1;
        for (int k = 1; k <= std::min(n, dims); ++k) {
            const auto up = pascal_[static_cast<std::size_t>(n - 1) * pascal_cols_ + k];
            const auto upleft = pascal_[static_cast<std::size_t>(n - 1) * pascal_cols_ + k - 1];
            pascal_[static_cast<std::size_t>(n) * pascal_cols_ + k] = up + upleft;
        }
    }
    size_ = static_cast<std::size_t>(count(dims, budget));
}

std::uint64_t SimplexIndexer::count(int dims_left, int budget) const {
    if (budget < 0) return 0;
    // Vectors with dims_left coordinates summing to <= budget.
    return pascal_[static_cast<std::size_t>(budget + dims_left) * pascal_cols_ + dims_left];
}

std::size_t SimplexIndexer::rank(std::span<const int> v) const {
    std::size_t r = 0;
    int rem = budget_;
    for (int a = 0; a < dims_; ++a) {
        const int t = v[static_cast<std::size_t>(a)];
        const int d_left = dims_ - a - 1;
        // sum_{u < t} count(d_left, rem - u), telescoped through the
        // cumulative identity sum_{u<=r} C(u+d, d) = C(r+d+1, d+1).
        r += count(d_left + 1, rem) - count(d_left + 1, rem - t);
        rem -= t;
    }
    return r;
}

void SimplexIndexer::unrank(std::size_t r, std::span<int> out) const {
    if (r >= size_) throw std::domain_error("SimplexIndexer::unrank: rank out of range");
    int rem = budget_;
    for (int a = 0; a < dims_; ++a) {
        const int d_left = dims_ - a - 1;
        int t = 0;
        while (r >= count(d_left, rem - t)) {
            r -= count(d_left, rem - t);
            ++t;
        }
        out[static_cast<std::size_t>(a)] = t;
        rem -= t;
    }
}

bool SimplexIndexer::next(std::span<int> v) const {
    int sum = 0;
    for (int a = 0; a < dims_; ++a) sum += v[static_cast<std::size_t>(a)];
    if (sum < budget_) {
        ++v[static_cast<std::size_t>(dims_ - 1)];
        return true;
    }
    int j = dims_ - 1;
    while (j >= 0 && v[static_cast<std::size_t>(j)] == 0) --j;
    if (j <= 0) return false;
    ++v[static_cast<std::size_t>(j - 1)];
    v[static_cast<std::size_t>(j)] = 0;
    return true;
}

WTensor basis_state_n(int L, int two_s, std::span<const int> m_levels) {
    if (static_cast<int>(m_levels.size()) != two_s)
        throw std::domain_error("basis_state_n: need one M per lowering operator");
    int sum = 0;
    for (int m : m_levels) {
        if (m < 0) throw std::domain_error("basis_state_n: negative M");
        sum += m;
    }
    if (sum > L) throw std::domain_error("basis_state_n: sum of M exceeds L");
    WTensor w;
    w.L = L;
    w.two_s = two_s;
    const SimplexIndexer idx(two_s, L);
    w.amps.assign(idx.size(), cd(0.0, 0.0));
    w.amps[idx.rank(m_levels)] = 1.0;
    return w;
}

double log_multinomial(int sites, std::span<const int> v) {
    int rem = sites;
    double ln = 0.0;
    for (int x : v) {
        if (x < 0 || x > rem) return kNegInf;
        ln += log_binomial(rem, x);
        rem -= x;
    }
    return ln;
}

double schmidt_lambda_n(int L, int n, std::span<const int> k_block, std::span<const int> m_total,
                        int two_s) {
    if (n < 1 || n > L - 1) throw std::domain_error("schmidt_lambda_n: need 1 <= n <= L-1");
    if (static_cast<int>(k_block.size()) != two_s || static_cast<int>(m_total.size()) != two_s)
        throw std::domain_error("schmidt_lambda_n: multi-index size mismatch");
    std::vector<int> env(static_cast<std::size_t>(two_s));
    for (int a = 0; a < two_s; ++a) {
        if (k_block[a] < 0 || k_block[a] > m_total[a]) return 0.0;
        env[static_cast<std::size_t>(a)] = m_total[a] - k_block[a];
    }
    const double ln_block = log_multinomial(n, k_block);
    const double ln_env = log_multinomial(L - n, env);
    const double ln_tot = log_multinomial(L, m_total);
    if (!std::isfinite(ln_block) || !std::isfinite(ln_env) || !std::isfinite(ln_tot)) return 0.0;
    return std::exp(0.5 * (ln_block + ln_env - ln_tot));
}

std::vector<cd> site_amp_n(int two_s, std::span<const double> angles) {
    if (static_cast<int>(angles.size()) != 2 * two_s)
        throw std::domain_error("site_amp_n: need (theta, phi) per lowering operator");
    std::vector<cd> v(static_cast<std::size_t>(two_s) + 1, cd(0.0, 0.0));
    v[0] = 1.0;
    for (int a = 1; a <= two_s; ++a) {
        const double theta = angles[static_cast<std::size_t>(2 * (a - 1))];
        const double phi = angles[static_cast<std::size_t>(2 * (a - 1) + 1)];
        const double c = std::cos(0.5 * theta);
        const double s = std::sin(0.5 * theta);
        const cd v0 = v[0];
        const cd va = v[static_cast<std::size_t>(a)];
        v[0] = (c * v0 + s * va) * std::polar(1.0, 0.5 * phi);
        v[static_cast<std::size_t>(a)] = (-s * v0 + c * va) * std::polar(1.0, -0.5 * phi);
    }
    double norm = 0.0;
    for (const auto& z : v) norm += std::norm(z);
    norm = std::sqrt(norm);
    for (auto& z : v) z /= norm;
    return v;
}

WTensor coherent_amps_n(int L, int two_s, std::span<const double> angles) {
    if (two_s < 1 || two_s > 15) throw std::domain_error("coherent_amps_n: two_s out of range");
    const auto v = site_amp_n(two_s, angles);
    const SimplexIndexer idx(two_s, L);

    // a_l(M) = sum_kappa sqrt(T(l-1, M - u_kappa) / T(l, M)) v_kappa a_{l-1}(M - u_kappa)
    // over one full-simplex array, entries with sum(M) > l implicitly zero.
    std::vector<cd> prev(idx.size(), cd(0.0, 0.0));
    std::vector<cd> cur(idx.size(), cd(0.0, 0.0));
    prev[0] = 1.0;

    std::vector<double> ln_t_prev(idx.size(), kNegInf);
    std::vector<double> ln_t_cur(idx.size(), kNegInf);
    ln_t_prev[0] = 0.0;

    std::vector<int> m(static_cast<std::size_t>(two_s));
    std::vector<int> shifted(static_cast<std::size_t>(two_s));
    for (int l = 1; l <= L; ++l) {
        std::fill(cur.begin(), cur.end(), cd(0.0, 0.0));
        std::fill(ln_t_cur.begin(), ln_t_cur.end(), kNegInf);
        std::fill(m.begin(), m.end(), 0);
        std::size_t r = 0;
        do {
            int sum = 0;
            for (int x : m) sum += x;
            if (sum > l) {
                ++r;
                continue;
            }
            // T(l, M) by the Pascal recurrence over the last site's level.
            double terms[16];
            int nt = 0;
            if (l - 1 >= sum) terms[nt++] = ln_t_prev[r];
            for (int a = 0; a < two_s; ++a) {
                if (m[static_cast<std::size_t>(a)] == 0) continue;
                std::copy(m.begin(), m.end(), shifted.begin());
                --shifted[static_cast<std::size_t>(a)];
                const double lt = ln_t_prev[idx.rank(shifted)];
                if (std::isfinite(lt)) terms[nt++] = lt;
            }
            double maxlog = kNegInf;
            for (int t = 0; t < nt; ++t) maxlog = std::max(maxlog, terms[t]);
            double ln_t = kNegInf;
            if (std::isfinite(maxlog)) {
                double acc = 0.0;
                for (int t = 0; t < nt; ++t) acc += std::exp(terms[t] - maxlog);
                ln_t = maxlog + std::log(acc);
            }
            ln_t_cur[r] = ln_t;
            if (!std::isfinite(ln_t)) {
                ++r;
                continue;
            }

            cd acc(0.0, 0.0);
            if (l - 1 >= sum && std::isfinite(ln_t_prev[r]))
                acc += std::exp(0.5 * (ln_t_prev[r] - ln_t)) * v[0] * prev[r];
            for (int a = 0; a < two_s; ++a) {
                if (m[static_cast<std::size_t>(a)] == 0) continue;
                std::copy(m.begin(), m.end(), shifted.begin());
                --shifted[static_cast<std::size_t>(a)];
                const std::size_t rs = idx.rank(shifted);
                if (!std::isfinite(ln_t_prev[rs])) continue;
                acc += std::exp(0.5 * (ln_t_prev[rs] - ln_t)) * v[static_cast<std::size_t>(a + 1)] *
                       prev[rs];
            }
            cur[r] = acc;
            ++r;
        } while (idx.next(m));
        prev.swap(cur);
        ln_t_prev.swap(ln_t_cur);
    }

    WTensor w;
    w.L = L;
    w.two_s = two_s;
    w.amps = std::move(prev);
    return w;
}

int phase_exponent_doubled(int L, std::span<const int> m, int alpha) {
    int h = L;
    for (int b = 0; b < alpha; ++b) h -= m[static_cast<std::size_t>(b)];
    h -= 2 * m[static_cast<std::size_t>(alpha)];
    return h;
}

namespace {

void normalize_or_throw_n(WTensor& w) {
    double norm_sq = 0.0;
    for (const auto& z : w.amps) norm_sq += std::norm(z);
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-280)
        throw CancellationError(
            "assemble_state_n: assembled norm below 1e-280; coefficients violate the restriction");
    for (auto& z : w.amps) z /= norm;
}

// The factorized assembly relies on a(theta, phi) = a(theta, 0) *
// prod_alpha e^{i phi_alpha g_alpha(M)}. Checked at 10 random phi
// shifts before use; a convention drift here would fail silently
// otherwise.
void verify_phase_structure(int L, int two_s, std::span<const double> thetas) {
    // Cheap at reduced size; parity of L kept since the exponents carry L/2.
    const int check_l = L <= 40 ? L : 40 + (L % 2);
    std::vector<double> angles(static_cast<std::size_t>(2 * two_s), 0.0);
    for (int a = 0; a < two_s; ++a) angles[static_cast<std::size_t>(2 * a)] = thetas[static_cast<std::size_t>(a)];
    const WTensor base = coherent_amps_n(check_l, two_s, angles);
    const SimplexIndexer idx(two_s, check_l);
    std::vector<int> m(static_cast<std::size_t>(two_s));

    for (int trial = 0; trial < 10; ++trial) {
        auto shifted = angles;
        for (int a = 0; a < two_s; ++a)
            shifted[static_cast<std::size_t>(2 * a + 1)] =
                2.0 * std::numbers::pi *
                rng_double(0xFEEDC0DEULL, 0x70686173ULL, static_cast<std::uint64_t>(trial * two_s + a));
        const WTensor probe = coherent_amps_n(check_l, two_s, shifted);

        std::fill(m.begin(), m.end(), 0);
        std::size_t r = 0;
        do {
            cd phase(1.0, 0.0);
            for (int a = 0; a < two_s; ++a)
                phase *= std::polar(1.0, shifted[static_cast<std::size_t>(2 * a + 1)] * 0.5 *
                                             phase_exponent_doubled(check_l, m, a));
            if (std::abs(probe.amps[r] - base.amps[r] * phase) > 1e-10)
                throw NumericalError(
                    "assemble_state_n: coherent overlaps do not factorize into the expected "
                    "phase structure");
            ++r;
        } while (idx.next(m));
    }
}

struct RealizedFactor {
    int pair;
    CantorSpec spec;
    int k;
    CoefficientProfile profile;
    ZeroInjection zeros;
    std::uint64_t total;
    bool materialized;
    std::vector<double> phis;   // filled when materialized
    std::vector<cd> coeffs;
};

std::vector<RealizedFactor> realize_factors(int two_s, const std::vector<FactorSupport>& factors) {
    if (factors.empty()) throw std::domain_error("assemble_state_n: no factors");
    if (static_cast<int>(factors.size()) > two_s)
        throw ConfigError("assemble_state_n: more factors than angular pairs");
    std::vector<bool> used(static_cast<std::size_t>(two_s), false);
    int teepees = 0;
    std::vector<RealizedFactor> out;
    for (const auto& f : factors) {
        if (f.pair < 0 || f.pair >= two_s) throw ConfigError("assemble_state_n: pair out of range");
        if (used[static_cast<std::size_t>(f.pair)])
            throw ConfigError("assemble_state_n: duplicate angular pair");
        used[static_cast<std::size_t>(f.pair)] = true;
        if (f.teepee) ++teepees;

        RealizedFactor rf;
        rf.pair = f.pair;
        rf.spec = f.cantor;
        rf.k = f.k;
        rf.profile = f.profile;
        rf.zeros = f.zeros;
        rf.total = cantor_total(f.cantor, f.k);
        rf.materialized = rf.total <= (std::uint64_t{1} << 24);
        if (rf.materialized) {
            const CantorSet set = cantor_points(f.cantor, f.k);
            rf.phis.resize(set.points.size());
            for (std::size_t i = 0; i < rf.phis.size(); ++i)
                rf.phis[i] = map_angle(set.points[i], AngleAxis::Phi);
            rf.coeffs = realize(f.profile, rf.phis, f.k, f.zeros);
        }
        out.push_back(std::move(rf));
    }
    if (teepees > 1) throw ConfigError("assemble_state_n: at most one teepee factor");
    return out;
}

}  // namespace

WTensor assemble_state_n(int L, int two_s, const std::vector<FactorSupport>& factors,
                         const ProductZeros& product_zeros) {
    const auto realized = realize_factors(two_s, factors);

    // Fixed thetas per pair; uncovered pairs sit at the north pole.
    std::vector<double> thetas(static_cast<std::size_t>(two_s), 0.0);
    int teepee_at = -1;
    const FactorSupport* teepee_factor = nullptr;
    for (const auto& f : factors) {
        thetas[static_cast<std::size_t>(f.pair)] = f.teepee ? 0.25 * f.theta_max : f.theta_fixed;
        if (f.teepee) {
            teepee_at = f.pair;
            teepee_factor = &f;
        }
    }
    verify_phase_structure(L, two_s, thetas);

    const SimplexIndexer idx(two_s, L);

    // Theta profile: quadrature-averaged b tensor (single node when no
    // teepee factor is present). b is real at phi = 0.
    std::vector<double> b_avg(idx.size(), 0.0);
    {
        std::vector<double> nodes{0.0};
        std::vector<double> weights{1.0};
        if (teepee_factor != nullptr) {
            TeepeeSpec tp{teepee_factor->cantor, teepee_factor->k, teepee_factor->theta_max,
                          teepee_factor->quadrature_nodes};
            const Quadrature quad = teepee_quadrature(tp);
            nodes = quad.nodes;
            weights = quad.weights;
        }
        std::vector<double> angles(static_cast<std::size_t>(2 * two_s), 0.0);
        for (int a = 0; a < two_s; ++a) angles[static_cast<std::size_t>(2 * a)] = thetas[static_cast<std::size_t>(a)];
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            if (teepee_at >= 0) angles[static_cast<std::size_t>(2 * teepee_at)] = nodes[q];
            const WTensor b = coherent_amps_n(L, two_s, angles);
            for (std::size_t r = 0; r < b_avg.size(); ++r) b_avg[r] += weights[q] * b.amps[r].real();
        }
    }

    // Per-factor phase sums P(h) = sum_g c_g e^{i phi_g h / 2} on the
    // integer grid h = 2 g_alpha(M) in [-2L, L].
    const int h_lo = -2 * L;
    const int h_count = 3 * L + 1;
    std::vector<std::vector<cd>> phase_sums(static_cast<std::size_t>(two_s));
    for (const auto& rf : realized)
        phase_sums[static_cast<std::size_t>(rf.pair)] = cantor_phase_sums(
            rf.spec, rf.k, rf.profile, rf.zeros, 0.5 * h_lo, 0.5, h_count, /*threads=*/2);

    WTensor w;
    w.L = L;
    w.two_s = two_s;
    w.amps.assign(idx.size(), cd(0.0, 0.0));
    {
        std::vector<int> m(static_cast<std::size_t>(two_s), 0);
        std::size_t r = 0;
        do {
            cd val(b_avg[r], 0.0);
            for (const auto& rf : realized) {
                const int h = phase_exponent_doubled(L, m, rf.pair);
                val *= phase_sums[static_cast<std::size_t>(rf.pair)][static_cast<std::size_t>(h - h_lo)];
            }
            w.amps[r] = val;
            ++r;
        } while (idx.next(m));
    }

    // Product-level zero injection: subtract the zeroed points'
    // contributions from the factorized sum.
    if (product_zeros.count > 0) {
        std::uint64_t total = 1;
        for (const auto& rf : realized) {
            if (!rf.materialized)
                throw ResourceError(
                    "assemble_state_n: product zeros need materializable factors");
            total *= rf.phis.size();
        }
        const auto positions = sample_zero_positions(total, product_zeros.count, product_zeros.seed, 0);

        std::vector<cd> corr(idx.size(), cd(0.0, 0.0));
        std::vector<std::vector<cd>> point_phases(realized.size());
        for (std::uint64_t flat : positions) {
            // Row-major factor digits, phases tabulated per factor.
            std::uint64_t rest = flat;
            cd c_z(1.0, 0.0);
            for (std::size_t fi = realized.size(); fi-- > 0;) {
                const auto& rf = realized[fi];
                const std::uint64_t gi = rest % rf.phis.size();
                rest /= rf.phis.size();
                c_z *= rf.coeffs[static_cast<std::size_t>(gi)];
                auto& tab = point_phases[fi];
                tab.resize(static_cast<std::size_t>(h_count));
                const double half_phi = 0.5 * rf.phis[static_cast<std::size_t>(gi)];
                const cd step = std::polar(1.0, half_phi);
                cd run = std::polar(1.0, half_phi * h_lo);
                for (int h = 0; h < h_count; ++h) {
                    if (h % 64 == 0) run = std::polar(1.0, half_phi * (h_lo + h));
                    tab[static_cast<std::size_t>(h)] = run;
                    run *= step;
                }
            }
            if (c_z == cd(0.0, 0.0)) continue;
            std::vector<int> m(static_cast<std::size_t>(two_s), 0);
            std::size_t r = 0;
            do {
                cd phase(1.0, 0.0);
                for (std::size_t fi = 0; fi < realized.size(); ++fi) {
                    const int h = phase_exponent_doubled(L, m, realized[fi].pair);
                    phase *= point_phases[fi][static_cast<std::size_t>(h - h_lo)];
                }
                corr[r] += c_z * phase;
                ++r;
            } while (idx.next(m));
        }
        for (std::size_t r = 0; r < w.amps.size(); ++r) w.amps[r] -= cd(b_avg[r], 0.0) * corr[r];
    }

    normalize_or_throw_n(w);
    return w;
}

WTensor assemble_state_n_naive(int L, int two_s, const std::vector<FactorSupport>& factors,
                               const ProductZeros& product_zeros) {
    const auto realized = realize_factors(two_s, factors);
    std::uint64_t total = 1;
    for (const auto& rf : realized) {
        if (!rf.materialized)
            throw ResourceError("assemble_state_n_naive: factor support too large");
        total *= rf.phis.size();
    }
    if (total > 100000)
        throw ResourceError("assemble_state_n_naive: product support too large for the naive path");

    std::vector<bool> zeroed(static_cast<std::size_t>(total), false);
    if (product_zeros.count > 0)
        for (std::uint64_t p : sample_zero_positions(total, product_zeros.count, product_zeros.seed, 0))
            zeroed[static_cast<std::size_t>(p)] = true;

    const FactorSupport* teepee_factor = nullptr;
    for (const auto& f : factors)
        if (f.teepee) teepee_factor = &f;
    std::vector<double> nodes{0.0};
    std::vector<double> weights{1.0};
    if (teepee_factor != nullptr) {
        TeepeeSpec tp{teepee_factor->cantor, teepee_factor->k, teepee_factor->theta_max,
                      teepee_factor->quadrature_nodes};
        const Quadrature quad = teepee_quadrature(tp);
        nodes = quad.nodes;
        weights = quad.weights;
    }

    const SimplexIndexer idx(two_s, L);
    WTensor w;
    w.L = L;
    w.two_s = two_s;
    w.amps.assign(idx.size(), cd(0.0, 0.0));

    std::vector<double> angles(static_cast<std::size_t>(2 * two_s), 0.0);
    for (const auto& f : factors)
        angles[static_cast<std::size_t>(2 * f.pair)] = f.teepee ? 0.0 : f.theta_fixed;

    for (std::uint64_t flat = 0; flat < total; ++flat) {
        if (zeroed[static_cast<std::size_t>(flat)]) continue;
        std::uint64_t rest = flat;
        cd c_z(1.0, 0.0);
        for (std::size_t fi = realized.size(); fi-- > 0;) {
            const auto& rf = realized[fi];
            const std::uint64_t gi = rest % rf.phis.size();
            rest /= rf.phis.size();
            c_z *= rf.coeffs[static_cast<std::size_t>(gi)];
            angles[static_cast<std::size_t>(2 * rf.pair + 1)] = rf.phis[static_cast<std::size_t>(gi)];
        }
        if (c_z == cd(0.0, 0.0)) continue;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            if (teepee_factor != nullptr)
                angles[static_cast<std::size_t>(2 * teepee_factor->pair)] = nodes[q];
            const WTensor a = coherent_amps_n(L, two_s, angles);
            const double wq = weights[q];
            for (std::size_t r = 0; r < w.amps.size(); ++r) w.amps[r] += c_z * wq * a.amps[r];
        }
    }

    normalize_or_throw_n(w);
    return w;
}

namespace {

struct ReducedRdm {
    std::vector<std::size_t> block_ranks;  // into SimplexIndexer(two_s, n)
    HermitianMatrix rho;
};

// Indices of the simplex(dims, budget) whose coordinates stay within
// level_cap componentwise.
std::vector<std::size_t> capped_ranks(const SimplexIndexer& idx, std::span<const int> level_cap,
                                      std::vector<std::vector<int>>* vectors_out) {
    std::vector<std::size_t> ranks;
    std::vector<int> v(static_cast<std::size_t>(idx.dims()), 0);
    std::size_t r = 0;
    do {
        bool ok = true;
        for (int a = 0; a < idx.dims() && ok; ++a)
            ok = v[static_cast<std::size_t>(a)] <= level_cap[static_cast<std::size_t>(a)];
        if (ok) {
            ranks.push_back(r);
            if (vectors_out) vectors_out->push_back(v);
        }
        ++r;
    } while (idx.next(v));
    return ranks;
}

ReducedRdm reduced_rdm_n(const WTensor& w, int n) {
    const int L = w.L;
    const int two_s = w.two_s;
    if (n < 1 || n > L - 1) throw std::domain_error("rdm_n: need 1 <= n <= L-1");

    const SimplexIndexer full(two_s, L);
    // Occupied level caps shrink the index sets when whole levels are
    // structurally absent (teepee supports on one angular pair).
    std::vector<int> cap(static_cast<std::size_t>(two_s), 0);
    {
        std::vector<int> m(static_cast<std::size_t>(two_s), 0);
        std::size_t r = 0;
        do {
            if (w.amps[r] != cd(0.0, 0.0))
                for (int a = 0; a < two_s; ++a)
                    cap[static_cast<std::size_t>(a)] =
                        std::max(cap[static_cast<std::size_t>(a)], m[static_cast<std::size_t>(a)]);
            ++r;
        } while (full.next(m));
    }

    const SimplexIndexer block_idx(two_s, n);
    const SimplexIndexer env_idx(two_s, L - n);
    std::vector<std::vector<int>> block_vecs, env_vecs;
    std::vector<std::size_t> block_ranks = capped_ranks(block_idx, cap, &block_vecs);
    std::vector<std::size_t> env_ranks = capped_ranks(env_idx, cap, &env_vecs);
    const std::size_t d_b = block_ranks.size();
    const std::size_t d_e = env_ranks.size();

    // ln multinomials for block, environment, and the full chain.
    std::vector<double> ln_block(d_b), ln_env(d_e);
    for (std::size_t i = 0; i < d_b; ++i) ln_block[i] = log_multinomial(n, block_vecs[i]);
    for (std::size_t j = 0; j < d_e; ++j) ln_env[j] = log_multinomial(L - n, env_vecs[j]);

    std::vector<cd> a(d_b * d_e, cd(0.0, 0.0));
    std::vector<int> m_sum(static_cast<std::size_t>(two_s));
    for (std::size_t i = 0; i < d_b; ++i) {
        for (std::size_t j = 0; j < d_e; ++j) {
            int sum = 0;
            for (int c = 0; c < two_s; ++c) {
                m_sum[static_cast<std::size_t>(c)] =
                    block_vecs[i][static_cast<std::size_t>(c)] + env_vecs[j][static_cast<std::size_t>(c)];
                sum += m_sum[static_cast<std::size_t>(c)];
            }
            if (sum > L) continue;
            const std::size_t mr = full.rank(m_sum);
            const cd amp = w.amps[mr];
            if (amp == cd(0.0, 0.0)) continue;
            const double ln_tot = log_multinomial(L, m_sum);
            a[i * d_e + j] = amp * std::exp(0.5 * (ln_block[i] + ln_env[j] - ln_tot));
        }
    }

    ReducedRdm out;
    out.block_ranks = std::move(block_ranks);
    out.rho = HermitianMatrix(static_cast<int>(d_b));
    for (std::size_t i = 0; i < d_b; ++i) {
        const cd* ri = a.data() + i * d_e;
        for (std::size_t j = i; j < d_b; ++j) {
            const cd* rj = a.data() + j * d_e;
            cd acc(0.0, 0.0);
            for (std::size_t q = 0; q < d_e; ++q) acc += ri[q] * std::conj(rj[q]);
            out.rho.set(static_cast<int>(i), static_cast<int>(j), acc);
        }
    }
    return out;
}

}  // namespace

HermitianMatrix rdm_n(const WTensor& w, int n) {
    const ReducedRdm red = reduced_rdm_n(w, n);
    const SimplexIndexer block_idx(w.two_s, n);
    HermitianMatrix rho(static_cast<int>(block_idx.size()));
    for (std::size_t i = 0; i < red.block_ranks.size(); ++i)
        for (std::size_t j = i; j < red.block_ranks.size(); ++j)
            rho.set(static_cast<int>(red.block_ranks[i]), static_cast<int>(red.block_ranks[j]),
                    red.rho.entry(static_cast<int>(i), static_cast<int>(j)));
    return rho;
}

EntropyProfile entropy_profile_n(const WTensor& w, const std::vector<int>& n_set, int threads) {
    const int L = w.L;
    const int two_s = w.two_s;
    for (int n : n_set)
        if (n < 1 || n > L - 1) throw std::domain_error("entropy_profile_n: n outside [1, L-1]");

    // Basis states have a diagonal reduced density matrix.
    int basis_rank = -1;
    {
        int count = 0;
        for (std::size_t r = 0; r < w.amps.size(); ++r)
            if (w.amps[r] != cd(0.0, 0.0)) {
                ++count;
                basis_rank = static_cast<int>(r);
            }
        if (count != 1) basis_rank = -1;
    }
    std::vector<int> basis_m(static_cast<std::size_t>(two_s));
    if (basis_rank >= 0) SimplexIndexer(two_s, L).unrank(static_cast<std::size_t>(basis_rank), basis_m);

    EntropyProfile profile;
    profile.L = L;
    profile.points.resize(n_set.size());

    parallel_for(static_cast<int>(n_set.size()), threads, [&](int i) {
        const int n = n_set[static_cast<std::size_t>(i)];
        const int block = std::min(n, L - n);
        double s = 0.0;
        if (basis_rank >= 0) {
            const SimplexIndexer block_idx(two_s, block);
            std::vector<int> k(static_cast<std::size_t>(two_s), 0);
            do {
                const double lam = schmidt_lambda_n(L, block, k, basis_m, two_s);
                const double p = lam * lam;
                if (p >= 1e-14) s -= p * std::log2(p);
            } while (block_idx.next(k));
        } else {
            const ReducedRdm red = reduced_rdm_n(w, block);
            s = entropy(red.rho);
        }
        profile.points[static_cast<std::size_t>(i)] = {n, s};
    });

    std::sort(profile.points.begin(), profile.points.end());
    return profile;
}

double so4_entropy(const WVector& ws, const WVector& wt, int n) {
    if (ws.L != wt.L) throw std::domain_error("so4_entropy: spin and orbital sizes differ");
    if (ws.two_s != 1 || wt.two_s != 1)
        throw std::domain_error("so4_entropy: both sectors must be spin-1/2");
    return entropy(rdm(ws, std::min(n, ws.L - n))) + entropy(rdm(wt, std::min(n, wt.L - n)));
}

EntropyProfile so4_profile(const WVector& ws, const WVector& wt, const std::vector<int>& n_set,
                           int threads) {
    if (ws.L != wt.L) throw std::domain_error("so4_profile: spin and orbital sizes differ");
    const EntropyProfile ps = entropy_profile(ws, n_set, threads);
    const EntropyProfile pt = entropy_profile(wt, n_set, threads);
    EntropyProfile out;
    out.L = ws.L;
    out.points.resize(ps.points.size());
    for (std::size_t i = 0; i < ps.points.size(); ++i)
        out.points[i] = {ps.points[i].first, ps.points[i].second + pt.points[i].second};
    return out;
}

}  // namespace fractent
