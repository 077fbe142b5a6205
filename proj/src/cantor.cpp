#include "fractent/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fractent/errors.hpp"
#include "fractent/rng.hpp"

namespace fractent {

void validate(const CantorSpec& spec) {
    if (spec.n_keep < 1 || spec.inv_r <= spec.n_keep) {
        std::ostringstream msg;
        msg << "CantorSpec: need inv_r > N >= 1, got N=" << spec.n_keep
            << ", inv_r=" << spec.inv_r;
        throw ConfigError(msg.str());
    }
}

double fractal_dimension(const CantorSpec& spec) {
    validate(spec);
    return std::log(static_cast<double>(spec.n_keep)) / std::log(static_cast<double>(spec.inv_r));
}

namespace {

void kept_indices(const CantorSpec& spec, int step, std::uint64_t parent,
                  std::vector<int>& out) {
    const int n = spec.n_keep;
    const int r = spec.inv_r;
    out.clear();
    if (spec.pattern == KeepPattern::Spread) {
        if (n == 1) {
            out.push_back(0);
        } else {
            for (int i = 0; i < n; ++i)
                out.push_back(static_cast<int>(
                    std::llround(static_cast<double>(i) * (r - 1) / (n - 1))));
        }
        return;
    }
    // SeededRandom: partial Fisher-Yates keyed by (seed, step, parent),
    // independent draw per parent interval.
    std::vector<int> pool(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) pool[static_cast<std::size_t>(i)] = i;
    const std::uint64_t stream =
        rng_stream::with_step(rng_stream::kCantorKeep, step) ^ mix64(parent);
    for (int i = 0; i < n; ++i) {
        const auto j = i + static_cast<int>(rng_below(spec.seed, stream, static_cast<std::uint64_t>(i),
                                                      static_cast<std::uint64_t>(r - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    out.assign(pool.begin(), pool.begin() + n);
    std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<int> kept_subintervals(const CantorSpec& spec, int step, std::uint64_t parent) {
    validate(spec);
    std::vector<int> out;
    kept_indices(spec, step, parent, out);
    return out;
}

std::uint64_t cantor_total(const CantorSpec& spec, int k) {
    validate(spec);
    if (k < 0) throw std::domain_error("cantor_total: step must be >= 0");
    std::uint64_t total = 1;
    for (int j = 0; j < k; ++j) {
        if (total > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(spec.n_keep))
            throw ResourceError("cantor_total: N^k exceeds 2^62");
        total *= static_cast<std::uint64_t>(spec.n_keep);
    }
    return total;
}

CantorSet cantor_points(const CantorSpec& spec, int k, std::size_t max_points) {
    validate(spec);
    if (k < 0) throw std::domain_error("cantor_points: step must be >= 0");

    // N^k points; refuse before allocating past the budget.
    double expected = 1.0;
    for (int j = 0; j < k; ++j) {
        expected *= spec.n_keep;
        if (expected > static_cast<double>(max_points)) {
            std::ostringstream msg;
            msg << "cantor_points: N^k = " << spec.n_keep << "^" << k
                << " exceeds the point budget " << max_points;
            throw ResourceError(msg.str());
        }
    }

    std::vector<double> starts{0.0};
    double width = 1.0;
    std::vector<int> keep;
    for (int step = 1; step <= k; ++step) {
        const double child_width = width / spec.inv_r;
        std::vector<double> next;
        next.reserve(starts.size() * static_cast<std::size_t>(spec.n_keep));
        for (std::size_t p = 0; p < starts.size(); ++p) {
            kept_indices(spec, step, static_cast<std::uint64_t>(p), keep);
            for (int idx : keep) next.push_back(starts[p] + idx * child_width);
        }
        starts = std::move(next);
        width = child_width;
    }

    CantorSet set;
    set.spec = spec;
    set.k = k;
    set.points.reserve(starts.size());
    for (double s : starts) set.points.push_back(s + 0.5 * width);
    return set;
}

double teepee_dimension(const TeepeeSpec& spec) {
    return 1.0 + std::log(static_cast<double>(spec.base.n_keep)) /
                     std::log(static_cast<double>(spec.base.inv_r));
}

Quadrature teepee_quadrature(const TeepeeSpec& spec) {
    if (spec.quadrature_nodes < 2)
        throw ConfigError("teepee_quadrature: need at least 2 nodes");
    if (!(spec.theta_max > 0.0 && spec.theta_max <= 2.0 * std::numbers::pi + 1e-12))
        throw ConfigError("teepee_quadrature: theta_max must lie in (0, 2 pi]");
    const int m = spec.quadrature_nodes;
    const double hi = 0.5 * spec.theta_max;
    const double h = hi / (m - 1);
    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(m));
    q.weights.assign(static_cast<std::size_t>(m), h);
    for (int i = 0; i < m; ++i) q.nodes[static_cast<std::size_t>(i)] = i * h;
    q.weights.front() *= 0.5;
    q.weights.back() *= 0.5;
    return q;
}

CantorSpec approximate_dimension(double target, double eps) {
    if (!(target > 0.0 && target < 1.0))
        throw std::domain_error("approximate_dimension: target must lie in (0, 1)");
    if (!(eps > 0.0)) throw std::domain_error("approximate_dimension: eps must be > 0");

    for (std::int64_t inv_r = 2; inv_r <= (std::int64_t{1} << 31); ++inv_r) {
        const double ideal = std::pow(static_cast<double>(inv_r), target);
        auto n = static_cast<std::int64_t>(std::llround(ideal));
        n = std::clamp<std::int64_t>(n, 1, inv_r - 1);
        const double dim = std::log(static_cast<double>(n)) / std::log(static_cast<double>(inv_r));
        if (std::abs(dim - target) <= eps)
            return CantorSpec{static_cast<int>(n), static_cast<int>(inv_r), KeepPattern::Spread, 0};
    }
    throw ResourceError("approximate_dimension: no spec with inv_r <= 2^31 meets eps");
}

double map_angle(double xi, AngleAxis axis) {
    if (xi < 0.0 || xi > 1.0) throw std::domain_error("map_angle: xi must lie in [0, 1]");
    return axis == AngleAxis::Phi ? 2.0 * std::numbers::pi * xi
                                  : 0.5 * std::numbers::pi * xi;
}

double ProductFractal::dimension() const {
    double d = 0.0;
    for (const auto& f : factors) d += fractal_dimension(f.set.spec);
    return d;
}

}  // namespace fractent
