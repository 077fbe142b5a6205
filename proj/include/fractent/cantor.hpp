#pragma once

#include <cstdint>
#include <vector>

namespace fractent {

enum class KeepPattern { Spread, SeededRandom };

// Construction rule for C[N, r; {k}]: split each surviving interval
// into inv_r parts and keep n_keep of them. Requires inv_r > n_keep >= 1.
struct CantorSpec {
    int n_keep = 2;
    int inv_r = 3;
    KeepPattern pattern = KeepPattern::Spread;
    std::uint64_t seed = 0;
};

void validate(const CantorSpec& spec);

// ln N / ln (1/r), in [0, 1).
double fractal_dimension(const CantorSpec& spec);

// Step-k realization: one representative (the midpoint) per surviving
// subinterval, strictly increasing, N^k points in total.
struct CantorSet {
    CantorSpec spec;
    int k = 0;
    std::vector<double> points;
};

CantorSet cantor_points(const CantorSpec& spec, int k,
                        std::size_t max_points = std::size_t{1} << 24);

// N^k; throws ResourceError past 2^62.
std::uint64_t cantor_total(const CantorSpec& spec, int k);

// Ascending indices of the kept subintervals for one parent interval at
// the given construction step.
std::vector<int> kept_subintervals(const CantorSpec& spec, int step, std::uint64_t parent);

// Cantor-teepee support: base Cantor set on one angular coordinate,
// line segments toward the apex handled as a quadrature over theta in
// [0, theta_max / 2] (the default theta_max = pi integrates [0, pi/2]).
struct TeepeeSpec {
    CantorSpec base;
    int k = 0;
    double theta_max = 3.14159265358979323846;
    int quadrature_nodes = 64;
};

// 1 + ln N / ln inv_r, i.e. 1 - log N / log r.
double teepee_dimension(const TeepeeSpec& spec);

// Uniform trapezoid nodes/weights on [0, theta_max / 2].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature teepee_quadrature(const TeepeeSpec& spec);

// A spec whose dimension is within eps of target, found by scanning
// inv_r upward with n_keep = round(inv_r^target). The dimensions of the
// Cantor family are dense in (0, 1), so the scan terminates unless eps
// pushes inv_r past 2^31.
CantorSpec approximate_dimension(double target, double eps);

enum class AngleAxis { Phi, Theta };

// Coset-space embedding of [0, 1]: phi(xi) = 2 pi xi, theta(xi) = (pi/2) xi.
double map_angle(double xi, AngleAxis axis);

// Decomposable fractal: one Cantor set per angular pair, each mapped
// onto its phi circle at a fixed theta. Dimension adds over factors.
struct ProductFactor {
    CantorSet set;
    double theta_fixed = 1.57079632679489661923;
};

struct ProductFractal {
    std::vector<ProductFactor> factors;
    double dimension() const;
};

}  // namespace fractent
