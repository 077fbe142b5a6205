#include "fractent/su2.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "fractent/errors.hpp"
#include "fractent/parallel.hpp"

namespace fractent {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> terms) {
    double maxlog = kNegInf;
    for (double t : terms) maxlog = std::max(maxlog, t);
    if (!std::isfinite(maxlog)) return kNegInf;
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - maxlog);
    return maxlog + std::log(acc);
}
}  // namespace

double epsilon_weight(int two_s, int two_u) {
    if (two_s < 1) throw std::domain_error("epsilon_weight: two_s must be >= 1");
    if (two_u < -two_s || two_u > two_s - 2 || ((two_u - two_s) % 2) != 0)
        throw std::domain_error("epsilon_weight: u must lie in {-s, -s+1, ..., s-1}");
    double num = 1.0;
    for (int two_m = two_u + 2; two_m <= two_s; two_m += 2)
        num *= 0.25 * (two_s + two_m) * (two_s - two_m + 2);
    double den = 1.0;
    for (int two_m = two_u; two_m <= two_s - 2; two_m += 2) {
        const double f = 0.5 * (two_s - two_m);
        den *= f * f;
    }
    return num / den;
}

NuTable::NuTable(int two_s, int sites) : two_s_(two_s), sites_(sites) {
    if (two_s < 1 || sites < 0) throw std::domain_error("NuTable: bad arguments");
    // Per-site weights: ln nu^2(1, kappa) = ln epsilon(s, s - kappa).
    std::vector<double> log_eps(static_cast<std::size_t>(two_s) + 1, 0.0);
    for (int kappa = 1; kappa <= two_s; ++kappa)
        log_eps[static_cast<std::size_t>(kappa)] = std::log(epsilon_weight(two_s, two_s - 2 * kappa));

    columns_.resize(static_cast<std::size_t>(sites) + 1);
    columns_[0] = {0.0};  // nu^2(0, 0) = 1
    std::vector<double> terms;
    for (int l = 1; l <= sites; ++l) {
        const auto& prev = columns_[static_cast<std::size_t>(l - 1)];
        auto& cur = columns_[static_cast<std::size_t>(l)];
        cur.assign(static_cast<std::size_t>(two_s) * l + 1, kNegInf);
        for (int m = 0; m < static_cast<int>(cur.size()); ++m) {
            terms.clear();
            for (int kappa = 0; kappa <= two_s; ++kappa) {
                const int rest = m - kappa;
                if (rest < 0 || rest >= static_cast<int>(prev.size())) continue;
                terms.push_back(log_eps[static_cast<std::size_t>(kappa)] +
                                prev[static_cast<std::size_t>(rest)]);
            }
            cur[static_cast<std::size_t>(m)] = log_sum_exp(terms);
        }
    }
}

double NuTable::log_nu_sq(int l, int m_weight) const {
    if (l < 0 || l > sites_) throw std::domain_error("NuTable: sites out of range");
    const auto& col = columns_[static_cast<std::size_t>(l)];
    if (m_weight < 0 || m_weight >= static_cast<int>(col.size())) return kNegInf;
    return col[static_cast<std::size_t>(m_weight)];
}

namespace {
std::mutex g_nu_mutex;
std::map<std::pair<int, int>, std::shared_ptr<const NuTable>> g_nu_cache;
}  // namespace

std::shared_ptr<const NuTable> nu_table(int two_s, int sites) {
    std::lock_guard<std::mutex> lock(g_nu_mutex);
    // Reuse any cached table that already covers `sites`.
    auto it = g_nu_cache.lower_bound({two_s, sites});
    if (it != g_nu_cache.end() && it->first.first == two_s) return it->second;
    auto table = std::make_shared<const NuTable>(two_s, sites);
    // Drop shorter tables for this spin; the new one subsumes them.
    for (auto jt = g_nu_cache.begin(); jt != g_nu_cache.end();) {
        if (jt->first.first == two_s)
            jt = g_nu_cache.erase(jt);
        else
            ++jt;
    }
    g_nu_cache[{two_s, sites}] = table;
    return table;
}

SignedLog nu(int sites, int m_weight, int two_s) {
    if (sites < 0) throw std::domain_error("nu: sites must be >= 0");
    if (m_weight < 0 || m_weight > two_s * sites) return SignedLog::zero();
    const auto table = nu_table(two_s, sites);
    const double lnsq = table->log_nu_sq(sites, m_weight);
    if (!std::isfinite(lnsq)) return SignedLog::zero();
    return SignedLog::from_log(1, 0.5 * lnsq);
}

double schmidt_lambda(int L, int n, int kappa, int M, int two_s) {
    if (n < 1 || n > L - 1) throw std::domain_error("schmidt_lambda: need 1 <= n <= L-1");
    if (M < 0 || M > two_s * L) throw std::domain_error("schmidt_lambda: M out of range");
    if (kappa < 0 || kappa > two_s * n) return 0.0;
    if (M - kappa < 0 || M - kappa > two_s * (L - n)) return 0.0;
    const auto table = nu_table(two_s, L);
    const double ln = 0.5 * (table->log_nu_sq(n, kappa) + table->log_nu_sq(L - n, M - kappa) -
                             table->log_nu_sq(L, M));
    return std::exp(ln);
}

namespace {
struct SchmidtKey {
    int two_s, L, n;
    bool operator<(const SchmidtKey& o) const {
        return std::tie(two_s, L, n) < std::tie(o.two_s, o.L, o.n);
    }
};
std::mutex g_schmidt_mutex;
std::map<SchmidtKey, std::shared_ptr<const SchmidtTable>> g_schmidt_cache;
std::deque<SchmidtKey> g_schmidt_order;
constexpr std::size_t kSchmidtCacheCapacity = 12;
}  // namespace

std::shared_ptr<const SchmidtTable> schmidt_table(int L, int n, int two_s) {
    if (n < 1 || n > L - 1) throw std::domain_error("schmidt_table: need 1 <= n <= L-1");
    const SchmidtKey key{two_s, L, n};
    {
        std::lock_guard<std::mutex> lock(g_schmidt_mutex);
        auto it = g_schmidt_cache.find(key);
        if (it != g_schmidt_cache.end()) return it->second;
    }

    const auto nu_tab = nu_table(two_s, L);
    auto table = std::make_shared<SchmidtTable>();
    table->L = L;
    table->n = n;
    table->two_s = two_s;
    table->kappa_count = two_s * n + 1;
    table->m_count = two_s * L + 1;
    table->lam.assign(static_cast<std::size_t>(table->kappa_count) * table->m_count, 0.0);
    const int env = L - n;
    for (int kappa = 0; kappa < table->kappa_count; ++kappa) {
        const double ln_block = nu_tab->log_nu_sq(n, kappa);
        for (int M = kappa; M < table->m_count && M - kappa <= two_s * env; ++M) {
            const double ln = ln_block + nu_tab->log_nu_sq(env, M - kappa) - nu_tab->log_nu_sq(L, M);
            table->lam[static_cast<std::size_t>(kappa) * table->m_count + M] = std::exp(0.5 * ln);
        }
    }

    std::lock_guard<std::mutex> lock(g_schmidt_mutex);
    auto [it, inserted] = g_schmidt_cache.try_emplace(key, table);
    if (inserted) {
        g_schmidt_order.push_back(key);
        while (g_schmidt_order.size() > kSchmidtCacheCapacity) {
            g_schmidt_cache.erase(g_schmidt_order.front());
            g_schmidt_order.pop_front();
        }
    }
    return it->second;
}

std::vector<std::complex<double>> site_amp(int two_s, double theta, double phi) {
    const int d = two_s + 1;
    using cd = std::complex<double>;
    const double s = 0.5 * two_s;

    // S^y from ladder elements, in the m = s..-s component order.
    std::vector<cd> sy(static_cast<std::size_t>(d) * d, cd(0.0, 0.0));
    auto at = [&](std::vector<cd>& m, int i, int j) -> cd& {
        return m[static_cast<std::size_t>(i) * d + j];
    };
    for (int i = 1; i < d; ++i) {
        const double m = s - i;  // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>
        const double amp = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
        at(sy, i - 1, i) = cd(0.0, -0.5) * amp;  // (S+ - S-) / 2i
        at(sy, i, i - 1) = cd(0.0, 0.5) * amp;
    }

    // exp(i theta S^y) by scaling and squaring of the series.
    std::vector<cd> x(sy);
    for (auto& v : x) v *= cd(0.0, theta);
    double norm1 = 0.0;
    for (int i = 0; i < d; ++i) {
        double row = 0.0;
        for (int j = 0; j < d; ++j) row += std::abs(at(x, i, j));
        norm1 = std::max(norm1, row);
    }
    int squarings = 0;
    while (norm1 > 0.5) {
        norm1 *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (auto& v : x) v *= scale;

    auto matmul = [&](const std::vector<cd>& a, const std::vector<cd>& b) {
        std::vector<cd> r(static_cast<std::size_t>(d) * d, cd(0.0, 0.0));
        for (int i = 0; i < d; ++i)
            for (int l = 0; l < d; ++l) {
                const cd v = a[static_cast<std::size_t>(i) * d + l];
                if (v == cd(0.0, 0.0)) continue;
                for (int j = 0; j < d; ++j) r[static_cast<std::size_t>(i) * d + j] += v * b[static_cast<std::size_t>(l) * d + j];
            }
        return r;
    };

    std::vector<cd> expm(static_cast<std::size_t>(d) * d, cd(0.0, 0.0));
    for (int i = 0; i < d; ++i) at(expm, i, i) = 1.0;
    std::vector<cd> power(expm);
    for (int term = 1; term <= 24; ++term) {
        power = matmul(power, x);
        for (auto& v : power) v /= static_cast<double>(term);
        for (std::size_t i = 0; i < power.size(); ++i) expm[i] += power[i];
    }
    for (int q = 0; q < squarings; ++q) expm = matmul(expm, expm);

    // Column of |s> (index 0), then the diagonal exp(i phi S^z).
    std::vector<cd> v(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        const double m = s - i;
        v[static_cast<std::size_t>(i)] = std::polar(1.0, phi * m) * at(expm, i, 0);
    }
    double norm = 0.0;
    for (const auto& z : v) norm += std::norm(z);
    norm = std::sqrt(norm);
    for (auto& z : v) z /= norm;
    return v;
}

std::vector<std::complex<double>> coherent_amps(int L, int two_s, double theta, double phi) {
    using cd = std::complex<double>;
    if (L < 1) throw std::domain_error("coherent_amps: L must be >= 1");
    const auto v = site_amp(two_s, theta, phi);
    const auto nu_tab = nu_table(two_s, L);

    // a_{l,M} = sum_kappa lambda(l, 1, kappa, M) v_{s-kappa} a_{l-1, M-kappa}
    std::vector<cd> prev{cd(1.0, 0.0)};  // l = 0: only M = 0
    std::vector<cd> cur;
    for (int l = 1; l <= L; ++l) {
        cur.assign(static_cast<std::size_t>(two_s) * l + 1, cd(0.0, 0.0));
        for (int M = 0; M < static_cast<int>(cur.size()); ++M) {
            cd acc(0.0, 0.0);
            for (int kappa = 0; kappa <= two_s && kappa <= M; ++kappa) {
                const int rest = M - kappa;
                if (rest >= static_cast<int>(prev.size())) continue;
                double lam;
                if (l == 1) {
                    lam = (M == kappa) ? 1.0 : 0.0;
                } else {
                    const double ln = nu_tab->log_nu_sq(1, kappa) +
                                      nu_tab->log_nu_sq(l - 1, rest) - nu_tab->log_nu_sq(l, M);
                    lam = std::exp(0.5 * ln);
                }
                acc += lam * v[static_cast<std::size_t>(kappa)] * prev[static_cast<std::size_t>(rest)];
            }
            cur[static_cast<std::size_t>(M)] = acc;
        }
        prev.swap(cur);
    }
    return prev;
}

WVector basis_state(int L, int two_s, int M) {
    if (M < 0 || M > two_s * L) throw std::domain_error("basis_state: M out of range");
    WVector w;
    w.L = L;
    w.two_s = two_s;
    w.amps.assign(static_cast<std::size_t>(two_s) * L + 1, 0.0);
    w.amps[static_cast<std::size_t>(M)] = 1.0;
    return w;
}

namespace {

void normalize_or_throw(WVector& w) {
    double norm_sq = 0.0;
    for (const auto& z : w.amps) norm_sq += std::norm(z);
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-280)
        throw CancellationError(
            "assemble_state: assembled norm below 1e-280; coefficients violate the restriction");
    for (auto& z : w.amps) z /= norm;
}

using cd = std::complex<double>;

// acc[m] += c e^{i phi (t_start + m t_step)}. Four independent chains
// hide the complex-multiply latency; heads are refreshed from polar()
// every block to stop drift.
void add_phase_source(cd* acc, int count, cd c, double phi, double t_start, double t_step) {
    constexpr int kBlock = 128;
    const cd step4 = std::polar(1.0, phi * t_step * 4.0);
    for (int block = 0; block < count; block += kBlock) {
        const int end = std::min(count, block + kBlock);
        cd run[4];
        const int lanes = std::min(4, end - block);
        for (int j = 0; j < lanes; ++j)
            run[j] = c * std::polar(1.0, phi * (t_start + (block + j) * t_step));
        int m = block;
        for (; m + 4 <= end; m += 4) {
            acc[m] += run[0];
            acc[m + 1] += run[1];
            acc[m + 2] += run[2];
            acc[m + 3] += run[3];
            run[0] *= step4;
            run[1] *= step4;
            run[2] *= step4;
            run[3] *= step4;
        }
        for (int j = 0; m < end; ++m, ++j) acc[m] += run[j];
    }
}

// Equal coefficients on the Spread pattern: the sum over the N^k
// midpoints factorizes over construction levels,
//   P(t) = e^{2 pi i t w_k / 2} prod_j sum_{a in keep} e^{2 pi i t a w_j}.
std::vector<cd> phase_sums_factorized(const CantorSpec& spec, int k, double t_start,
                                      double t_step, int count) {
    const std::vector<int> keep = kept_subintervals(spec, 1, 0);
    std::vector<double> widths(static_cast<std::size_t>(k) + 1);
    widths[0] = 1.0;
    for (int j = 1; j <= k; ++j) widths[static_cast<std::size_t>(j)] = widths[static_cast<std::size_t>(j - 1)] / spec.inv_r;

    std::vector<cd> out(static_cast<std::size_t>(count));
    const double two_pi = 2.0 * std::numbers::pi;
    for (int m = 0; m < count; ++m) {
        const double t = t_start + m * t_step;
        cd p = std::polar(1.0, two_pi * t * 0.5 * widths[static_cast<std::size_t>(k)]);
        for (int j = 1; j <= k; ++j) {
            cd level(0.0, 0.0);
            for (int a : keep) level += std::polar(1.0, two_pi * t * a * widths[static_cast<std::size_t>(j)]);
            p *= level;
        }
        out[static_cast<std::size_t>(m)] = p;
    }
    return out;
}

// Streaming enumeration for supports past the materialization budget:
// a mixed-radix odometer over the kept-subinterval digits, coefficients
// drawn per point index, fixed 64-way chunking so results do not depend
// on the thread count.
std::vector<cd> phase_sums_streamed(const CantorSpec& spec, int k,
                                    const CoefficientProfile& profile, const ZeroInjection& zeros,
                                    double t_start, double t_step, int count, int threads) {
    if (spec.pattern != KeepPattern::Spread)
        throw ResourceError(
            "cantor_phase_sums: seeded-random supports beyond the point budget are not supported");
    const std::uint64_t total = cantor_total(spec, k);
    if (zeros.count >= total) throw ConfigError("cantor_phase_sums: zero count >= support size");
    const std::vector<int> keep = kept_subintervals(spec, 1, 0);
    const int n_keep = static_cast<int>(keep.size());

    std::vector<std::uint64_t> zero_positions;
    if (zeros.count > 0) zero_positions = sample_zero_positions(total, zeros.count, zeros.seed, k);

    std::vector<double> widths(static_cast<std::size_t>(k) + 1);
    widths[0] = 1.0;
    for (int j = 1; j <= k; ++j) widths[static_cast<std::size_t>(j)] = widths[static_cast<std::size_t>(j - 1)] / spec.inv_r;
    const double half_width = 0.5 * widths[static_cast<std::size_t>(k)];

    constexpr int kChunks = 64;
    std::vector<std::vector<cd>> partial(kChunks);

    parallel_for(kChunks, threads, [&](int chunk) {
        const std::uint64_t lo = total / kChunks * static_cast<std::uint64_t>(chunk) +
                                 std::min<std::uint64_t>(static_cast<std::uint64_t>(chunk), total % kChunks);
        const std::uint64_t size = total / kChunks + (static_cast<std::uint64_t>(chunk) < total % kChunks ? 1 : 0);
        auto& acc = partial[static_cast<std::size_t>(chunk)];
        acc.assign(static_cast<std::size_t>(count), cd(0.0, 0.0));
        if (size == 0) return;

        // Digits of the first point, most significant level first.
        std::vector<int> digit(static_cast<std::size_t>(k), 0);
        {
            std::uint64_t rest = lo;
            for (int j = k; j >= 1; --j) {
                digit[static_cast<std::size_t>(j - 1)] = static_cast<int>(rest % static_cast<std::uint64_t>(n_keep));
                rest /= static_cast<std::uint64_t>(n_keep);
            }
        }
        // Interval start accumulated level by level, same additions as
        // the materializing constructor.
        std::vector<double> prefix(static_cast<std::size_t>(k) + 1, 0.0);
        for (int j = 1; j <= k; ++j)
            prefix[static_cast<std::size_t>(j)] =
                prefix[static_cast<std::size_t>(j - 1)] +
                keep[static_cast<std::size_t>(digit[static_cast<std::size_t>(j - 1)])] * widths[static_cast<std::size_t>(j)];

        auto zero_it = zero_positions.empty()
                           ? zero_positions.end()
                           : std::lower_bound(zero_positions.begin(), zero_positions.end(), lo);

        for (std::uint64_t g = lo; g < lo + size; ++g) {
            bool is_zero = false;
            if (zero_it != zero_positions.end() && *zero_it == g) {
                is_zero = true;
                ++zero_it;
            }
            if (!is_zero) {
                const double phi =
                    map_angle(prefix[static_cast<std::size_t>(k)] + half_width, AngleAxis::Phi);
                const cd c = coefficient_at(profile, phi, g, k);
                if (c != cd(0.0, 0.0)) add_phase_source(acc.data(), count, c, phi, t_start, t_step);
            }
            if (g + 1 == lo + size) break;
            int j = k;
            while (digit[static_cast<std::size_t>(j - 1)] == n_keep - 1) {
                digit[static_cast<std::size_t>(j - 1)] = 0;
                --j;
            }
            ++digit[static_cast<std::size_t>(j - 1)];
            for (int i = j; i <= k; ++i)
                prefix[static_cast<std::size_t>(i)] =
                    prefix[static_cast<std::size_t>(i - 1)] +
                    keep[static_cast<std::size_t>(digit[static_cast<std::size_t>(i - 1)])] * widths[static_cast<std::size_t>(i)];
        }
    });

    std::vector<cd> out(static_cast<std::size_t>(count), cd(0.0, 0.0));
    for (const auto& acc : partial)
        for (int m = 0; m < count; ++m) out[static_cast<std::size_t>(m)] += acc[static_cast<std::size_t>(m)];
    return out;
}

}  // namespace

std::vector<cd> cantor_phase_sums(const CantorSpec& spec, int k, const CoefficientProfile& profile,
                                  const ZeroInjection& zeros, double t_start, double t_step,
                                  int count, int threads, std::uint64_t materialize_budget) {
    const std::uint64_t total = cantor_total(spec, k);
    const bool factorizable = std::holds_alternative<EqualProfile>(profile) &&
                              spec.pattern == KeepPattern::Spread && zeros.count == 0;
    if (factorizable && total > (std::uint64_t{1} << 16))
        return phase_sums_factorized(spec, k, t_start, t_step, count);
    if (total <= materialize_budget) {
        const CantorSet set = cantor_points(spec, k);
        std::vector<double> phis(set.points.size());
        for (std::size_t i = 0; i < phis.size(); ++i) phis[i] = map_angle(set.points[i], AngleAxis::Phi);
        const auto coeffs = realize(profile, phis, k, zeros);
        std::vector<cd> out(static_cast<std::size_t>(count), cd(0.0, 0.0));
        for (std::size_t g = 0; g < phis.size(); ++g)
            if (coeffs[g] != cd(0.0, 0.0))
                add_phase_source(out.data(), count, coeffs[g], phis[g], t_start, t_step);
        return out;
    }
    if (factorizable) return phase_sums_factorized(spec, k, t_start, t_step, count);
    return phase_sums_streamed(spec, k, profile, zeros, t_start, t_step, count, threads);
}

WVector assemble_phi_points(int L, int two_s, std::span<const double> phis,
                            std::span<const std::complex<double>> coeffs, double theta_fixed) {
    if (phis.size() != coeffs.size() || phis.empty())
        throw std::domain_error("assemble_phi_points: bad support");
    const int m_count = two_s * L + 1;
    const double t0 = 0.5 * two_s * L;  // sL - M at M = 0

    std::vector<cd> phase_sum(static_cast<std::size_t>(m_count), cd(0.0, 0.0));
    for (std::size_t g = 0; g < phis.size(); ++g)
        if (coeffs[g] != cd(0.0, 0.0))
            add_phase_source(phase_sum.data(), m_count, coeffs[g], phis[g], t0, -1.0);

    const auto b = coherent_amps(L, two_s, theta_fixed, 0.0);
    WVector w;
    w.L = L;
    w.two_s = two_s;
    w.amps.resize(static_cast<std::size_t>(m_count));
    for (int M = 0; M < m_count; ++M)
        w.amps[static_cast<std::size_t>(M)] = b[static_cast<std::size_t>(M)] * phase_sum[static_cast<std::size_t>(M)];
    normalize_or_throw(w);
    return w;
}

WVector assemble_theta_points(int L, int two_s, std::span<const double> thetas,
                              std::span<const std::complex<double>> coeffs, double phi_fixed) {
    if (thetas.size() != coeffs.size() || thetas.empty())
        throw std::domain_error("assemble_theta_points: bad support");
    const int m_count = two_s * L + 1;
    WVector w;
    w.L = L;
    w.two_s = two_s;
    w.amps.assign(static_cast<std::size_t>(m_count), cd(0.0, 0.0));
    for (std::size_t g = 0; g < thetas.size(); ++g) {
        if (coeffs[g] == cd(0.0, 0.0)) continue;
        const auto a = coherent_amps(L, two_s, thetas[g], phi_fixed);
        for (int M = 0; M < m_count; ++M)
            w.amps[static_cast<std::size_t>(M)] += coeffs[g] * a[static_cast<std::size_t>(M)];
    }
    normalize_or_throw(w);
    return w;
}

namespace {

// Quadrature-averaged b_{LM}(theta); b is real at phi = 0.
std::vector<double> averaged_b(int L, int two_s, const Quadrature& quad) {
    const int m_count = two_s * L + 1;
    std::vector<double> b_avg(static_cast<std::size_t>(m_count), 0.0);
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
        const auto b = coherent_amps(L, two_s, quad.nodes[q], 0.0);
        for (int M = 0; M < m_count; ++M)
            b_avg[static_cast<std::size_t>(M)] += quad.weights[q] * b[static_cast<std::size_t>(M)].real();
    }
    return b_avg;
}

WVector combine_b_and_phase(int L, int two_s, std::span<const double> b,
                            std::span<const cd> phase_sum) {
    WVector w;
    w.L = L;
    w.two_s = two_s;
    w.amps.resize(b.size());
    for (std::size_t m = 0; m < b.size(); ++m) w.amps[m] = b[m] * phase_sum[m];
    normalize_or_throw(w);
    return w;
}

}  // namespace

WVector assemble_teepee_points(int L, int two_s, std::span<const double> phis,
                               std::span<const std::complex<double>> coeffs,
                               const Quadrature& quad) {
    if (phis.size() != coeffs.size() || phis.empty())
        throw std::domain_error("assemble_teepee_points: bad support");
    const int m_count = two_s * L + 1;
    const double t0 = 0.5 * two_s * L;

    // Coefficients are theta-independent, so the double sum factorizes
    // into (quadrature average of b) x (phase sum over the Cantor set).
    const std::vector<double> b_avg = averaged_b(L, two_s, quad);
    std::vector<cd> phase_sum(static_cast<std::size_t>(m_count), cd(0.0, 0.0));
    for (std::size_t g = 0; g < phis.size(); ++g)
        if (coeffs[g] != cd(0.0, 0.0))
            add_phase_source(phase_sum.data(), m_count, coeffs[g], phis[g], t0, -1.0);
    return combine_b_and_phase(L, two_s, b_avg, phase_sum);
}

WVector assemble_state(int L, int two_s, const SupportSpec& support,
                       const CoefficientProfile& profile, const ZeroInjection& zeros,
                       int threads) {
    const int m_count = two_s * L + 1;
    const double t0 = 0.5 * two_s * L;

    if (support.kind == SupportSpec::Kind::CantorTheta) {
        const CantorSet set = cantor_points(support.cantor, support.k);
        std::vector<double> angles(set.points.size());
        for (std::size_t i = 0; i < angles.size(); ++i)
            angles[i] = map_angle(set.points[i], AngleAxis::Theta);
        const auto coeffs = realize(profile, angles, support.k, zeros);
        return assemble_theta_points(L, two_s, angles, coeffs, support.fixed_angle);
    }

    const auto phase_sum = cantor_phase_sums(support.cantor, support.k, profile, zeros, t0, -1.0,
                                             m_count, threads);
    if (support.kind == SupportSpec::Kind::CantorPhi) {
        const auto b = coherent_amps(L, two_s, support.fixed_angle, 0.0);
        std::vector<double> b_real(b.size());
        for (std::size_t m = 0; m < b.size(); ++m) b_real[m] = b[m].real();
        return combine_b_and_phase(L, two_s, b_real, phase_sum);
    }
    TeepeeSpec tp{support.cantor, support.k, support.theta_max, support.quadrature_nodes};
    return combine_b_and_phase(L, two_s, averaged_b(L, two_s, teepee_quadrature(tp)), phase_sum);
}

}  // namespace fractent
