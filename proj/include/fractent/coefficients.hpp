#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fractent/cantor.hpp"

namespace fractent {

// The continuous amplitude/phase functions shipped with the type-ii
// realization. Periodic-matched at 0 and 2 pi.
enum class NamedFn {
    Cos2PhiPlus1Plus2,   // cos(2 phi + 1) + 2
    PhiSquaredOver2Pi,   // phi^2 / (2 pi)
    CosPhiPlus1Plus2,    // cos(phi + 1) + 2
    PhiCubedOver4PiSq,   // phi^3 / (4 pi^2)
};

double eval_named(NamedFn fn, double phi);

struct EqualProfile {};

// Type-i: one draw per support point, amplitude and phase each uniform
// over a prescribed finite set.
struct RandomSetsProfile {
    std::vector<double> amp_set;
    std::vector<double> phase_set;
    std::uint64_t seed = 0;
};

// Type-ii: amplitude and phase predetermined by continuous functions.
struct ContinuousProfile {
    NamedFn amp_fn = NamedFn::Cos2PhiPlus1Plus2;
    NamedFn phase_fn = NamedFn::PhiSquaredOver2Pi;
};

using CoefficientProfile = std::variant<EqualProfile, RandomSetsProfile, ContinuousProfile>;

// The amplitude/phase sets used by the type-i realization:
// {0.1, ..., 1.0} and {pi/10, ..., pi}.
RandomSetsProfile standard_random_sets(std::uint64_t seed);
ContinuousProfile standard_continuous_primary();    // cos(2phi+1)+2, phi^2/(2pi)
ContinuousProfile standard_continuous_secondary();  // cos(phi+1)+2, phi^3/(4pi^2)

// Force `count` coefficients to zero, positions drawn uniformly without
// replacement from a separate seed. Legitimate counts grow at most
// polynomially in k (0, k^2, k^4 are provided).
struct ZeroInjection {
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
};

enum class ZeroPolicy { None, KSquared, KFourth };
std::uint64_t zero_count_for(ZeroPolicy policy, int k);

// `count` distinct positions in [0, n_total), sorted ascending.
std::vector<std::uint64_t> sample_zero_positions(std::uint64_t n_total, std::uint64_t count,
                                                 std::uint64_t seed, int k);

// Coefficient of support point `index` at `angle`, before zero
// injection; realize() produces exactly these values.
std::complex<double> coefficient_at(const CoefficientProfile& profile, double angle,
                                    std::uint64_t index, int k);

// One complex coefficient per support angle. Deterministic in
// (profile, angles, k, zeros) regardless of evaluation order.
std::vector<std::complex<double>> realize(const CoefficientProfile& profile,
                                          std::span<const double> angles, int k,
                                          const ZeroInjection& zeros);

// ln of the norm of the unnormalized linear combination per step k,
// evaluated through the coherent-state Gram matrix so that arbitrarily
// large L is just an exponent. The slope of ln||w|| against k ln N is
// ~1/2 once L resolves the finest subinterval scale.
struct NormGrowthPoint {
    int k;
    double log_norm;
};
std::vector<NormGrowthPoint> norm_growth_check(const CoefficientProfile& profile,
                                               const CantorSpec& spec, int k_lo, int k_hi,
                                               int two_s, double sites, double theta,
                                               ZeroPolicy zeros = ZeroPolicy::None,
                                               std::uint64_t zero_seed = 1);

}  // namespace fractent
