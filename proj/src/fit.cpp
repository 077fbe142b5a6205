#include "fractent/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace fractent {

FitResult linear_fit(const std::vector<std::pair<double, double>>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw std::domain_error("linear_fit: need at least 2 points");

    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if (sxx == 0.0) throw std::domain_error("linear_fit: all x identical (degenerate fit)");

    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = mean_y - r.slope * mean_x;
    for (const auto& [x, y] : points)
        r.max_abs_residual = std::max(r.max_abs_residual, std::abs(y - (r.slope * x + r.intercept)));
    return r;
}

}  // namespace fractent
