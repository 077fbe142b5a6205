#include <cmath>
#include <complex>
#include <numbers>

#include <doctest.h>

#include "fractent/entanglement.hpp"
#include "fractent/errors.hpp"
#include "fractent/oracle.hpp"
#include "fractent/rng.hpp"
#include "fractent/signed_log.hpp"
#include "fractent/su2.hpp"

using namespace fractent;
using cd = std::complex<double>;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("two-site triplet from explicit lowering") {
    const auto st = oracle::dense_basis_state(2, 1, 1);
    REQUIRE(st.amps.size() == 4);
    CHECK(std::abs(st.amps[1] - cd(1.0 / std::sqrt(2.0), 0.0)) <= 1e-14);
    CHECK(std::abs(st.amps[2] - cd(1.0 / std::sqrt(2.0), 0.0)) <= 1e-14);
    CHECK(std::abs(st.amps[0]) <= 1e-14);
    CHECK(std::abs(st.amps[3]) <= 1e-14);
}

TEST_CASE("M = 0 is the product highest weight state") {
    const auto st = oracle::dense_basis_state(3, 2, 0);
    CHECK(std::abs(st.amps[0] - cd(1.0, 0.0)) <= 1e-14);
    for (std::size_t i = 1; i < st.amps.size(); ++i) CHECK(std::abs(st.amps[i]) <= 1e-14);
}

TEST_CASE("pre-normalization norm equals M! nu(L, M)") {
    // ||S_-^M |s...s>|| against the constrained-sum normalization.
    for (auto [L, two_s, M] : {std::tuple{3, 2, 2}, std::tuple{4, 1, 2}, std::tuple{3, 3, 4}}) {
        double pre = 0.0;
        oracle::dense_basis_state(L, two_s, M, &pre);
        const double expect = std::exp(log_factorial(M)) * nu(L, M, two_s).to_double();
        CHECK(pre == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("SU(3) pre-normalization matches the Z formula") {
    // Z = prod_alpha M_alpha! sqrt(C(L - prev, M_alpha))
    const int L = 5;
    const std::vector<int> m{2, 1};
    double pre = 0.0;
    oracle::dense_basis_state_n(L, 2, m, &pre);
    const double z = std::exp(log_factorial(2) + log_factorial(1)) *
                     std::exp(0.5 * (log_binomial(5, 2) + log_binomial(3, 1)));
    CHECK(pre == doctest::Approx(z).epsilon(1e-12));
}

TEST_CASE("dense product state is the Kronecker power") {
    const std::vector<cd> site{cd(0.6, 0.0), cd(0.0, 0.8)};
    const auto st = oracle::dense_product_state(3, site);
    REQUIRE(st.amps.size() == 8);
    CHECK(std::abs(st.amps[0] - cd(0.216, 0.0)) <= 1e-14);           // 0.6^3
    CHECK(std::abs(st.amps[7] - cd(0.0, -0.512)) <= 1e-14);  // (0.8i)^3
    double norm = 0.0;
    for (const auto& z : st.amps) norm += std::norm(z);
    CHECK(std::abs(norm - 1.0) <= 1e-13);

    const std::vector<cd> e1{cd(1.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0)};
    const auto top = oracle::dense_product_state(4, e1);
    CHECK(std::abs(top.amps[0] - cd(1.0, 0.0)) <= 1e-15);
}

TEST_CASE("overlap of basis and product states equals coherent_amps") {
    for (int L : {2, 4, 6}) {
        for (int two_s : {1, 2}) {
            const double theta = 0.8, phi = 2.3;
            const auto amps = coherent_amps(L, two_s, theta, phi);
            const auto product = oracle::dense_product_state(L, site_amp(two_s, theta, phi));
            for (int M = 0; M <= two_s * L; ++M) {
                const auto basis = oracle::dense_basis_state(L, two_s, M);
                CHECK(std::abs(oracle::dense_overlap(basis, product) -
                               amps[static_cast<std::size_t>(M)]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("dense entropy basics") {
    const std::vector<cd> site{cd(0.8, 0.0), cd(0.6, 0.0)};
    const auto product = oracle::dense_product_state(5, site);
    for (int n = 1; n <= 4; ++n) CHECK(std::abs(oracle::dense_entropy(product, n)) <= 1e-12);

    const auto triplet = oracle::dense_basis_state(2, 1, 1);
    CHECK(oracle::dense_entropy(triplet, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dense entropy is symmetric under complementation") {
    // Random state in the permutation-invariant sector, where leading
    // and trailing blocks of equal size carry the same entropy.
    const int L = 6;
    oracle::DenseState st{L, 2, {}};
    st.amps.assign(64, cd(0.0, 0.0));
    for (int M = 0; M <= L; ++M) {
        const cd coeff(rng_double(9, 1, static_cast<std::uint64_t>(M)) - 0.5,
                       rng_double(9, 2, static_cast<std::uint64_t>(M)) - 0.5);
        const auto basis = oracle::dense_basis_state(L, 1, M);
        for (std::size_t i = 0; i < st.amps.size(); ++i) st.amps[i] += coeff * basis.amps[i];
    }
    double norm = 0.0;
    for (const auto& z : st.amps) norm += std::norm(z);
    norm = std::sqrt(norm);
    for (auto& z : st.amps) z /= norm;
    for (int n = 1; n < L; ++n)
        CHECK(std::abs(oracle::dense_entropy(st, n) - oracle::dense_entropy(st, L - n)) <= 1e-10);
}

TEST_CASE("superposed coherent states: pipeline equals dense end to end") {
    const int L = 6, two_s = 1;
    const double phi1 = 0.9, phi2 = 4.0;
    const auto a1 = coherent_amps(L, two_s, std::numbers::pi / 2, phi1);
    const auto a2 = coherent_amps(L, two_s, std::numbers::pi / 2, phi2);
    WVector w{L, two_s, {}};
    w.amps.resize(a1.size());
    double norm = 0.0;
    for (std::size_t M = 0; M < a1.size(); ++M) {
        w.amps[M] = a1[M] + a2[M];
        norm += std::norm(w.amps[M]);
    }
    norm = std::sqrt(norm);
    for (auto& z : w.amps) z /= norm;

    const auto p1 = oracle::dense_product_state(L, site_amp(two_s, std::numbers::pi / 2, phi1));
    const auto p2 = oracle::dense_product_state(L, site_amp(two_s, std::numbers::pi / 2, phi2));
    oracle::DenseState dense{L, 2, {}};
    dense.amps.resize(64);
    for (std::size_t i = 0; i < 64; ++i) dense.amps[i] = (p1.amps[i] + p2.amps[i]) / norm;

    const double pipeline = entropy(rdm(w, 3));
    CHECK(std::abs(pipeline - oracle::dense_entropy(dense, 3)) <= 1e-10);
}

TEST_CASE("amplitude budget is enforced") {
    CHECK_THROWS_AS(oracle::dense_basis_state(30, 2, 1), ResourceError);
}

TEST_SUITE_END();
