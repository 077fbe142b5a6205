#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <doctest.h>

#include "fractent/errors.hpp"
#include "fractent/fit.hpp"
#include "fractent/linalg.hpp"
#include "fractent/rng.hpp"
#include "fractent/signed_log.hpp"

using namespace fractent;

namespace {

// Characteristic-polynomial oracle: det(A - x I) for a Hermitian matrix
// is real; its sign changes bracket the eigenvalues.
double det_shifted(const HermitianMatrix& h, double x) {
    const int d = h.dim();
    std::vector<std::complex<double>> a(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            a[static_cast<std::size_t>(i) * d + j] = h.entry(i, j) - (i == j ? x : 0.0);
    // LU with partial pivoting; determinant from the diagonal.
    std::complex<double> det = 1.0;
    for (int col = 0; col < d; ++col) {
        int pivot = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * d + col]) >
                std::abs(a[static_cast<std::size_t>(pivot) * d + col]))
                pivot = r;
        if (pivot != col) {
            for (int j = 0; j < d; ++j)
                std::swap(a[static_cast<std::size_t>(col) * d + j], a[static_cast<std::size_t>(pivot) * d + j]);
            det = -det;
        }
        const auto p = a[static_cast<std::size_t>(col) * d + col];
        if (std::abs(p) == 0.0) return 0.0;
        det *= p;
        for (int r = col + 1; r < d; ++r) {
            const auto f = a[static_cast<std::size_t>(r) * d + col] / p;
            for (int j = col; j < d; ++j)
                a[static_cast<std::size_t>(r) * d + j] -= f * a[static_cast<std::size_t>(col) * d + j];
        }
    }
    return det.real();
}

std::vector<double> eigenvalues_by_bisection(const HermitianMatrix& h) {
    const int d = h.dim();
    double radius = 0.0;
    for (int i = 0; i < d; ++i) {
        double row = 0.0;
        for (int j = 0; j < d; ++j) row += std::abs(h.entry(i, j));
        radius = std::max(radius, row);
    }
    radius += 1.0;

    // Fine scan for sign changes, then bisection on each bracket.
    const int grid = 20000;
    std::vector<double> roots;
    double x_prev = -radius;
    double f_prev = det_shifted(h, x_prev);
    for (int g = 1; g <= grid; ++g) {
        const double x = -radius + 2.0 * radius * g / grid;
        const double f = det_shifted(h, x);
        if ((f_prev < 0.0) != (f < 0.0)) {
            double lo = x_prev, hi = x;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((det_shifted(h, mid) < 0.0) == (f_prev < 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x_prev = x;
        f_prev = f;
    }
    return roots;
}

}  // namespace

TEST_SUITE_BEGIN("numerics");

TEST_CASE("log_binomial small exact cases") {
    CHECK(log_binomial(4, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
    CHECK(log_binomial(17, 0) == 0.0);
    CHECK(log_binomial(0, 0) == 0.0);
    CHECK_THROWS_AS(log_binomial(3, 4), std::domain_error);
}

TEST_CASE("log_binomial(200,100) matches the direct log-sum oracle") {
    double oracle = 0.0;
    for (int m = 101; m <= 200; ++m) oracle += std::log(static_cast<double>(m));
    for (int m = 1; m <= 100; ++m) oracle -= std::log(static_cast<double>(m));
    CHECK(std::abs(log_binomial(200, 100) - oracle) <= 1e-12);
}

TEST_CASE("log_binomial reproduces exact integers up to n = 60") {
    for (int n = 0; n <= 60; ++n) {
        double c = 1.0;  // running exact binomial
        for (int k = 0; k <= n; ++k) {
            CHECK(std::exp(log_binomial(n, k)) == doctest::Approx(c).epsilon(1e-12));
            c = c * (n - k) / (k + 1);
        }
    }
}

TEST_CASE("slog_sum basics") {
    const SignedLog two = SignedLog::from_double(2.0);
    const SignedLog three = SignedLog::from_double(3.0);
    const SignedLog minus_two = SignedLog::from_double(-2.0);

    std::vector<SignedLog> v{two, three};
    CHECK(slog_sum(v).to_double() == doctest::Approx(5.0).epsilon(1e-14));

    v = {two, minus_two};
    CHECK(slog_sum(v).sign == 0);

    CHECK(SignedLog::from_double(12.5).to_double() == doctest::Approx(12.5).epsilon(1e-14));
    CHECK(SignedLog::zero().to_double() == 0.0);
}

TEST_CASE("slog_sum matches direct summation on random signed terms") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        std::vector<SignedLog> terms;
        double direct = 0.0;
        for (std::uint64_t i = 0; i < 100; ++i) {
            const double logmag = -5.0 + 10.0 * rng_double(7, trial, 2 * i);
            const int sign = rng_word(7, trial, 2 * i + 1) % 2 == 0 ? 1 : -1;
            terms.push_back(SignedLog::from_log(sign, logmag));
            direct += sign * std::exp(logmag);
        }
        const double got = slog_sum(terms).to_double();
        CHECK(std::abs(got - direct) <= 1e-12 * std::abs(direct));
    }
}

TEST_CASE("slog_sum is permutation invariant") {
    std::vector<SignedLog> terms;
    for (std::uint64_t i = 0; i < 50; ++i)
        terms.push_back(SignedLog::from_log(i % 3 == 0 ? -1 : 1,
                                            -4.0 + 8.0 * rng_double(11, 0, i)));
    const double base = slog_sum(terms).to_double();
    std::mt19937_64 gen(123);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        std::shuffle(terms.begin(), terms.end(), gen);
        CHECK(slog_sum(terms).to_double() == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("hermitian_eigenvalues trivial spectra") {
    HermitianMatrix id2(2);
    id2.set(0, 0, 1.0);
    id2.set(1, 1, 1.0);
    const auto eig_id = hermitian_eigenvalues(id2);
    CHECK(eig_id[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(eig_id[1] == doctest::Approx(1.0).epsilon(1e-13));

    HermitianMatrix sx(2);
    sx.set(0, 1, 1.0);
    const auto eig_sx = hermitian_eigenvalues(sx);
    CHECK(eig_sx[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(eig_sx[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("hermitian_eigenvalues matches the characteristic polynomial on a random 6x6") {
    HermitianMatrix h(6);
    for (int i = 0; i < 6; ++i) {
        h.set(i, i, 2.0 * rng_double(42, 1, static_cast<std::uint64_t>(i)) - 1.0);
        for (int j = i + 1; j < 6; ++j) {
            const std::uint64_t c = static_cast<std::uint64_t>(10 + 6 * i + j);
            h.set(i, j, std::complex<double>(rng_double(42, 2, c) - 0.5, rng_double(42, 3, c) - 0.5));
        }
    }
    const auto jac = hermitian_eigenvalues(h);
    const auto ref = eigenvalues_by_bisection(h);
    REQUIRE(ref.size() == jac.size());
    for (std::size_t i = 0; i < jac.size(); ++i)
        CHECK(std::abs(jac[i] - ref[i]) <= 1e-10);
}

TEST_CASE("eigenvalue sum preserves the trace") {
    for (int d : {3, 9, 24}) {
        HermitianMatrix h(d);
        for (int i = 0; i < d; ++i) {
            h.set(i, i, rng_double(5, 9, static_cast<std::uint64_t>(i)));
            for (int j = i + 1; j < d; ++j) {
                const auto c = static_cast<std::uint64_t>(100 + i * d + j);
                h.set(i, j, std::complex<double>(rng_double(5, 10, c) - 0.5,
                                                 rng_double(5, 11, c) - 0.5));
            }
        }
        const auto eig = hermitian_eigenvalues(h);
        double sum = 0.0;
        for (double v : eig) sum += v;
        CHECK(std::abs(sum - h.trace()) <= 1e-10 * d);
    }
}

TEST_CASE("linear_fit exact and perturbed lines") {
    FitResult exact = linear_fit({{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}});
    CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(exact.intercept == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exact.max_abs_residual <= 1e-12);

    FitResult flat = linear_fit({{0.0, 0.7}, {1.0, 0.7}, {2.0, 0.7}});
    CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(flat.intercept == doctest::Approx(0.7).epsilon(1e-14));

    std::vector<std::pair<double, double>> noisy;
    for (int i = 0; i < 40; ++i) {
        const double x = 0.25 * i;
        const double bump = (i % 2 == 0 ? 1.0 : -1.0) * 1e-3;
        noisy.emplace_back(x, 0.5 * x + 0.3 + bump);
    }
    CHECK(std::abs(linear_fit(noisy).slope - 0.5) <= 1e-2);

    CHECK_THROWS_AS(linear_fit({{1.0, 2.0}, {1.0, 3.0}}), std::domain_error);
    CHECK_THROWS_AS(linear_fit({{1.0, 2.0}}), std::domain_error);
}

TEST_SUITE_END();
