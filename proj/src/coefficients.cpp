#include "fractent/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "fractent/errors.hpp"
#include "fractent/rng.hpp"

namespace fractent {

namespace {
constexpr double kPi = std::numbers::pi;
}

double eval_named(NamedFn fn, double phi) {
    switch (fn) {
        case NamedFn::Cos2PhiPlus1Plus2: return std::cos(2.0 * phi + 1.0) + 2.0;
        case NamedFn::PhiSquaredOver2Pi: return phi * phi / (2.0 * kPi);
        case NamedFn::CosPhiPlus1Plus2: return std::cos(phi + 1.0) + 2.0;
        case NamedFn::PhiCubedOver4PiSq: return phi * phi * phi / (4.0 * kPi * kPi);
    }
    throw std::logic_error("eval_named: unknown function");
}

RandomSetsProfile standard_random_sets(std::uint64_t seed) {
    RandomSetsProfile p;
    for (int i = 1; i <= 10; ++i) {
        p.amp_set.push_back(0.1 * i);
        p.phase_set.push_back(kPi * i / 10.0);
    }
    p.seed = seed;
    return p;
}

ContinuousProfile standard_continuous_primary() {
    return {NamedFn::Cos2PhiPlus1Plus2, NamedFn::PhiSquaredOver2Pi};
}

ContinuousProfile standard_continuous_secondary() {
    return {NamedFn::CosPhiPlus1Plus2, NamedFn::PhiCubedOver4PiSq};
}

std::uint64_t zero_count_for(ZeroPolicy policy, int k) {
    const auto kk = static_cast<std::uint64_t>(k);
    switch (policy) {
        case ZeroPolicy::None: return 0;
        case ZeroPolicy::KSquared: return kk * kk;
        case ZeroPolicy::KFourth: return kk * kk * kk * kk;
    }
    throw std::logic_error("zero_count_for: unknown policy");
}

std::vector<std::uint64_t> sample_zero_positions(std::uint64_t n_total, std::uint64_t count,
                                                 std::uint64_t seed, int k) {
    if (count >= n_total && count > 0)
        throw ConfigError("zero injection would zero every coefficient");
    // Floyd's sampling: uniform without replacement, one rng word per pick.
    const std::uint64_t stream = rng_stream::with_step(rng_stream::kZeroPositions, k);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(count) * 2 + 1);
    for (std::uint64_t j = n_total - count; j < n_total; ++j) {
        const std::uint64_t t = rng_below(seed, stream, j, j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::complex<double> coefficient_at(const CoefficientProfile& profile, double angle,
                                    std::uint64_t index, int k) {
    if (std::holds_alternative<EqualProfile>(profile)) return {1.0, 0.0};
    if (const auto* rs = std::get_if<RandomSetsProfile>(&profile)) {
        if (rs->amp_set.empty() || rs->phase_set.empty())
            throw ConfigError("coefficient_at: random-sets profile needs nonempty value sets");
        const double amp = rs->amp_set[rng_below(
            rs->seed, rng_stream::with_step(rng_stream::kAmplitude, k), index, rs->amp_set.size())];
        const double phase = rs->phase_set[rng_below(
            rs->seed, rng_stream::with_step(rng_stream::kPhase, k), index, rs->phase_set.size())];
        return std::polar(amp, phase);
    }
    const auto& cont = std::get<ContinuousProfile>(profile);
    return std::polar(eval_named(cont.amp_fn, angle), eval_named(cont.phase_fn, angle));
}

std::vector<std::complex<double>> realize(const CoefficientProfile& profile,
                                          std::span<const double> angles, int k,
                                          const ZeroInjection& zeros) {
    if (angles.empty()) throw std::domain_error("realize: empty support");
    if (zeros.count >= angles.size())
        throw ConfigError("realize: zero count must stay below the support size");

    std::vector<std::complex<double>> c(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i)
        c[i] = coefficient_at(profile, angles[i], i, k);

    if (zeros.count > 0) {
        for (std::uint64_t pos : sample_zero_positions(angles.size(), zeros.count, zeros.seed, k))
            c[static_cast<std::size_t>(pos)] = 0.0;
    }
    return c;
}

std::vector<NormGrowthPoint> norm_growth_check(const CoefficientProfile& profile,
                                               const CantorSpec& spec, int k_lo, int k_hi,
                                               int two_s, double sites, double theta,
                                               ZeroPolicy zeros, std::uint64_t zero_seed) {
    if (k_hi < k_lo) throw std::domain_error("norm_growth_check: empty k range");
    const double cc = std::cos(0.5 * theta) * std::cos(0.5 * theta);
    const double ss = 1.0 - cc;
    const double power = static_cast<double>(two_s) * sites;

    std::vector<NormGrowthPoint> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        const CantorSet set = cantor_points(spec, k);
        std::vector<double> phis(set.points.size());
        for (std::size_t i = 0; i < phis.size(); ++i) phis[i] = map_angle(set.points[i], AngleAxis::Phi);
        const auto c = realize(profile, phis, k,
                               ZeroInjection{zero_count_for(zeros, k), zero_seed});

        // ||w||^2 = sum_{g,g'} conj(c_g) c_g' <psi_g|psi_g'>, with the
        // coherent-state overlap (cos^2 e^{i d/2} + sin^2 e^{-i d/2})^{2sL}.
        // Accumulated in the log domain: pass 1 finds the dominant
        // magnitude, pass 2 sums the rescaled complex terms.
        const std::size_t m = phis.size();
        auto term = [&](std::size_t i, std::size_t j, double& logmag, double& arg) {
            const double d = 0.5 * (phis[j] - phis[i]);
            const std::complex<double> zeta(cc * std::cos(d) + ss * std::cos(-d),
                                            cc * std::sin(d) + ss * std::sin(-d));
            const double amp2 = std::abs(c[i]) * std::abs(c[j]);
            if (amp2 == 0.0 || std::abs(zeta) == 0.0) {
                logmag = -std::numeric_limits<double>::infinity();
                arg = 0.0;
                return;
            }
            logmag = std::log(amp2) + power * std::log(std::abs(zeta));
            arg = std::arg(c[j]) - std::arg(c[i]) + power * std::arg(zeta);
        };
        double maxlog = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double lm, ar;
                term(i, j, lm, ar);
                maxlog = std::max(maxlog, lm);
            }
        if (!std::isfinite(maxlog))
            throw CancellationError("norm_growth_check: all terms vanished");
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double lm, ar;
                term(i, j, lm, ar);
                if (std::isfinite(lm)) acc += std::polar(std::exp(lm - maxlog), ar);
            }
        const double norm_sq_log = maxlog + std::log(std::abs(acc));
        out.push_back({k, 0.5 * norm_sq_log});
    }
    return out;
}

}  // namespace fractent
