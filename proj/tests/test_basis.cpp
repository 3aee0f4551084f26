#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "solpath/basis.hpp"

using namespace solpath;

TEST_CASE("legendre features match closed forms") {
    Basis b = Basis::legendre(4, 1);
    auto f0 = b.eval_features(std::vector<double>{0.0});
    CHECK(f0[0] == doctest::Approx(1.0));
    CHECK(f0[1] == doctest::Approx(0.0));
    CHECK(f0[2] == doctest::Approx(-0.5));
    CHECK(f0[3] == doctest::Approx(0.0));

    auto fh = b.eval_features(std::vector<double>{0.5});
    CHECK(fh[1] == doctest::Approx(0.5));
    CHECK(fh[2] == doctest::Approx(-0.125));         // (3x^2 - 1)/2
    CHECK(fh[3] == doctest::Approx(-0.4375));        // (5x^3 - 3x)/2
    auto f1 = b.eval_features(std::vector<double>{1.0});
    for (double v : f1) CHECK(v == doctest::Approx(1.0));  // P_n(1) = 1
}

TEST_CASE("shifted legendre maps the box to [-1, 1]") {
    Basis b = Basis::shifted_legendre(3, 1, 0.0, 10.0);
    auto mid = b.eval_features(std::vector<double>{5.0});
    CHECK(mid[1] == doctest::Approx(0.0));
    CHECK(mid[2] == doctest::Approx(-0.5));
    auto hi = b.eval_features(std::vector<double>{10.0});
    CHECK(hi[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)b.eval_features(std::vector<double>{10.5}), std::domain_error);
}

TEST_CASE("jacobi features agree with the recurrence at spot values") {
    // P_1^{(a,b)}(x) = (a - b)/2 + (a + b + 2)/2 * x
    double vals[3];
    jacobi_all(3, 1.0, 2.0, 0.3, vals);
    CHECK(vals[0] == doctest::Approx(1.0));
    CHECK(vals[1] == doctest::Approx(-0.5 + 2.5 * 0.3));
    // a = b = 0 reduces to Legendre.
    double leg[5], jac[5];
    legendre_all(5, 0.37, leg);
    jacobi_all(5, 0.0, 0.0, 0.37, jac);
    for (int i = 0; i < 5; ++i) CHECK(jac[i] == doctest::Approx(leg[i]));
}

TEST_CASE("monomial features are plain powers") {
    Basis b = Basis::monomial(4, 1);
    auto f = b.eval_features(std::vector<double>{-0.5});
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == doctest::Approx(-0.5));
    CHECK(f[2] == doctest::Approx(0.25));
    CHECK(f[3] == doctest::Approx(-0.125));
}

TEST_CASE("tensor basis multiplies per-axis legendre features") {
    Basis b = Basis::tensor_legendre_2d(4, 1, {-1.0, -1.0}, {1.0, 1.0});
    std::vector<double> lam{0.5, -0.25};
    auto f = b.eval_features(lam);
    double px[2], py[2];
    legendre_all(2, 0.5, px);
    legendre_all(2, -0.25, py);
    // (i, j) lexicographic over degrees per axis.
    CHECK(f[0] == doctest::Approx(px[0] * py[0]));
    CHECK(f[1] == doctest::Approx(px[0] * py[1]));
    CHECK(f[2] == doctest::Approx(px[1] * py[0]));
    CHECK(f[3] == doctest::Approx(px[1] * py[1]));
    CHECK_THROWS(Basis::tensor_legendre_2d(3, 1, {-1.0, -1.0}, {1.0, 1.0}));
}

TEST_CASE("portfolio custom features cycle coordinates with lambda_2 powers") {
    std::vector<double> lo(12, 0.0), hi(12, 1.0);
    lo[1] = 0.2;
    Basis b = Basis::portfolio_custom_12d(13, 1, lo, hi);
    std::vector<double> lam(12);
    for (int k = 0; k < 12; ++k) lam[k] = 0.2 + 0.05 * k;
    auto f = b.eval_features(lam);
    // First tier sweeps the raw coordinates; the 13th feature starts the
    // lambda_2-weighted tier.
    for (int k = 0; k < 12; ++k) CHECK(f[k] == doctest::Approx(lam[k]));
    CHECK(f[12] == doctest::Approx(lam[0] * lam[1]));
}

TEST_CASE("apply contracts block-major coefficients") {
    Basis b = Basis::legendre(2, 3);
    Coefficients beta = b.zeros();
    // theta_i = c_i0 * 1 + c_i1 * lambda
    beta.values = {1.0, 0.0, 0.0, 1.0, 2.0, -1.0};
    auto theta = b.apply(beta, std::vector<double>{0.5});
    CHECK(theta[0] == doctest::Approx(1.0));
    CHECK(theta[1] == doctest::Approx(0.5));
    CHECK(theta[2] == doctest::Approx(1.5));
}

TEST_CASE("pullback is the transpose of apply") {
    Basis b = Basis::legendre(3, 2);
    std::vector<double> lam{0.3};
    std::vector<double> g{2.0, -1.0};
    auto pb = b.pullback(g, lam);
    REQUIRE(pb.size() == 6);
    auto psi = b.eval_features(lam);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) CHECK(pb[i * 3 + j] == doctest::Approx(g[i] * psi[j]));
    // <Phi' g, beta> == <g, Phi beta> for random-ish beta.
    Coefficients beta = b.zeros();
    for (int k = 0; k < 6; ++k) beta.values[k] = 0.1 * (k + 1) * (k % 2 ? -1 : 1);
    auto theta = b.apply(beta, lam);
    double lhs = 0.0, rhs = 0.0;
    for (int k = 0; k < 6; ++k) lhs += pb[k] * beta.values[k];
    for (int i = 0; i < 2; ++i) rhs += g[i] * theta[i];
    CHECK(lhs == doctest::Approx(rhs));
}

TEST_CASE("pullback of a toy gradient matches hand computation") {
    Basis b = Basis::monomial(2, 1);
    auto pb = b.pullback(std::vector<double>{2.0}, std::vector<double>{0.5});
    CHECK(pb[0] == doctest::Approx(2.0));
    CHECK(pb[1] == doctest::Approx(1.0));
}

TEST_CASE("coefficients are rejected by a foreign basis") {
    Basis a = Basis::legendre(2, 1);
    Basis c = Basis::legendre(3, 1);
    Coefficients beta = a.zeros();
    CHECK_THROWS_AS((void)c.apply(beta, std::vector<double>{0.0}), std::invalid_argument);
    Coefficients wrong{a.id(), std::vector<double>(3, 0.0)};
    CHECK_THROWS_AS((void)a.apply(wrong, std::vector<double>{0.0}), std::invalid_argument);
}

TEST_CASE("extend keeps old features at mapped positions") {
    SUBCASE("1-d families append") {
        Basis b = Basis::legendre(3, 2);
        Basis e = b.extend();
        CHECK(e.q() == 4);
        auto map = b.extension_index_map();
        REQUIRE(map.size() == 3);
        for (int j = 0; j < 3; ++j) CHECK(map[j] == j);
        std::vector<double> lam{0.7};
        auto fb = b.eval_features(lam);
        auto fe = e.eval_features(lam);
        for (int j = 0; j < 3; ++j) CHECK(fe[map[j]] == doctest::Approx(fb[j]));
    }
    SUBCASE("tensor family reorders lexicographically") {
        Basis b = Basis::tensor_legendre_2d(4, 1, {-1.0, 0.0}, {1.0, 2.0});
        Basis e = b.extend();
        CHECK(e.q() == 9);
        auto map = b.extension_index_map();
        std::vector<double> lam{0.3, 1.2};
        auto fb = b.eval_features(lam);
        auto fe = e.eval_features(lam);
        for (int j = 0; j < 4; ++j) CHECK(fe[map[j]] == doctest::Approx(fb[j]));
    }
    SUBCASE("portfolio family appends") {
        std::vector<double> lo(12, 0.0), hi(12, 1.0);
        Basis b = Basis::portfolio_custom_12d(13, 2, lo, hi);
        Basis e = b.extend();
        CHECK(e.q() == 14);
        auto map = b.extension_index_map();
        for (int j = 0; j < 13; ++j) CHECK(map[j] == j);
    }
}

TEST_CASE("extended coefficients reproduce the old path when padded with zeros") {
    Basis b = Basis::legendre(2, 2);
    Basis e = b.extend();
    Coefficients beta = b.zeros();
    beta.values = {1.0, -0.5, 0.25, 2.0};
    auto map = b.extension_index_map();
    Coefficients padded = e.zeros();
    for (int i = 0; i < b.d(); ++i)
        for (int j = 0; j < b.q(); ++j)
            padded.values[i * e.q() + map[j]] = beta.values[i * b.q() + j];
    std::vector<double> lam{-0.4};
    auto t0 = b.apply(beta, lam);
    auto t1 = e.apply(padded, lam);
    for (int i = 0; i < 2; ++i) CHECK(t1[i] == doctest::Approx(t0[i]));
}

TEST_CASE("basis ids encode the family and shape") {
    Basis a = Basis::legendre(3, 2);
    Basis b = Basis::legendre(3, 2);
    Basis c = Basis::legendre(4, 2);
    CHECK(a.id() == b.id());
    CHECK(a.id() != c.id());
    CHECK(Basis::monomial(3, 2).id() != a.id());
}

TEST_CASE("invalid shapes are rejected") {
    CHECK_THROWS_AS(Basis::legendre(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Basis::legendre(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(Basis::shifted_legendre(2, 1, 1.0, 1.0), std::invalid_argument);
    std::vector<double> lo(12, 0.0), hi(12, 1.0);
    CHECK_THROWS_AS(Basis::portfolio_custom_12d(2, 1, {0.0}, {1.0}), std::invalid_argument);
    Basis b = Basis::legendre(2, 1);
    CHECK_THROWS_AS((void)b.eval_features(std::vector<double>{0.0, 0.0}),
                    std::invalid_argument);
}
