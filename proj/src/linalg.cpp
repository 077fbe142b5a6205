#include "fractent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fractent/errors.hpp"

namespace fractent {

namespace {

double off_diagonal_norm(const std::vector<double>& a, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double v = a[static_cast<std::size_t>(i) * d + j];
            s += v * v;
        }
    return std::sqrt(2.0 * s);
}

double frobenius_norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(std::vector<double>& a, int d,
                                       double tol_rel, int max_sweeps) {
    if (d <= 0) throw std::domain_error("jacobi_eigenvalues: dim must be >= 1");
    if (d == 1) return {a[0]};

    const double norm = frobenius_norm(a);
    const double tol = tol_rel * norm;
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * d + j]; };

    // Entries below the per-element share of the convergence target are
    // zeroed instead of rotated; the collective off-norm change stays
    // within tol.
    const double tol_elem = tol / d;

    int sweep = 0;
    double off = off_diagonal_norm(a, d);
    for (; sweep < max_sweeps && off > tol && norm > 0.0; ++sweep) {
        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = at(p, q);
                const double app = at(p, p);
                const double aqq = at(q, q);
                if (std::abs(apq) <= tol_elem) {
                    at(p, q) = 0.0;
                    continue;
                }
                if (apq == 0.0) continue;

                const double theta = 0.5 * (aqq - app) / apq;
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // Only the upper triangle is maintained; the three index
                // segments cover the rotated row/column pair within it.
                double* rp = a.data() + static_cast<std::size_t>(p) * d;
                double* rq = a.data() + static_cast<std::size_t>(q) * d;
                for (int j = 0; j < p; ++j) {
                    double* cp = a.data() + static_cast<std::size_t>(j) * d;
                    const double x = cp[p];
                    const double y = cp[q];
                    cp[p] = c * x - s * y;
                    cp[q] = s * x + c * y;
                }
                for (int j = p + 1; j < q; ++j) {
                    const double x = rp[j];
                    const double y = a[static_cast<std::size_t>(j) * d + q];
                    rp[j] = c * x - s * y;
                    a[static_cast<std::size_t>(j) * d + q] = s * x + c * y;
                }
                for (int j = q + 1; j < d; ++j) {
                    const double x = rp[j];
                    const double y = rq[j];
                    rp[j] = c * x - s * y;
                    rq[j] = s * x + c * y;
                }
                rp[p] = app - t * apq;
                rq[q] = aqq + t * apq;
                rp[q] = 0.0;
            }
        }
        off = off_diagonal_norm(a, d);
    }

    if (off > tol && norm > 0.0) {
        std::ostringstream msg;
        msg << "jacobi_eigenvalues: no convergence after " << max_sweeps
            << " sweeps (dim " << d << ", off-norm " << off << ", target " << tol << ")";
        throw NumericalError(msg.str());
    }

    std::vector<double> eig(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h,
                                          double tol_rel, int max_sweeps) {
    const int d = h.dim();
    if (d <= 0) throw std::domain_error("hermitian_eigenvalues: dim must be >= 1");
    if (d == 1) return {h.entry(0, 0).real()};

    const int n = 2 * d;
    std::vector<double> e(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const cdouble z = h.entry(i, j);
            e[static_cast<std::size_t>(i) * n + j] = z.real();
            e[static_cast<std::size_t>(i) * n + j + d] = -z.imag();
            e[static_cast<std::size_t>(i + d) * n + j] = z.imag();
            e[static_cast<std::size_t>(i + d) * n + j + d] = z.real();
        }
    }

    std::vector<double> doubled = jacobi_eigenvalues(e, n, tol_rel, max_sweeps);
    // The embedding doubles every eigenvalue; fold adjacent pairs.
    std::vector<double> eig(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        eig[static_cast<std::size_t>(i)] =
            0.5 * (doubled[static_cast<std::size_t>(2 * i)] + doubled[static_cast<std::size_t>(2 * i + 1)]);
    return eig;
}

}  // namespace fractent
