#pragma once

#include <utility>
#include <vector>

namespace fractent {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double max_abs_residual = 0.0;
};

// Ordinary least squares y = slope * x + intercept. Needs at least two
// points with at least two distinct x; throws std::domain_error otherwise.
FitResult linear_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace fractent
