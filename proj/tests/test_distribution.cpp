#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "solpath/distribution.hpp"

using namespace solpath;

namespace {

double beta_moment(double a, double b, int k) {
    double m = 1.0;
    for (int i = 0; i < k; ++i) m *= (a + i) / (a + b + i);
    return m;
}

}  // namespace

TEST_CASE("gauss-legendre order 2 hits the textbook nodes") {
    std::vector<double> x, w;
    gauss_legendre(2, x, w);
    const double r = 1.0 / std::sqrt(3.0);
    CHECK(x[0] == doctest::Approx(-r).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(r).epsilon(1e-14));
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(0.5));
}

TEST_CASE("gauss-legendre order 4 matches tabulated values") {
    std::vector<double> x, w;
    gauss_legendre(4, x, w);
    CHECK(x[0] == doctest::Approx(-0.8611363115940526).epsilon(1e-13));
    CHECK(x[1] == doctest::Approx(-0.3399810435848563).epsilon(1e-13));
    // Standard weights 0.347854..., 0.652145... halve under the probability
    // convention.
    CHECK(w[0] == doctest::Approx(0.34785484513745385 / 2.0).epsilon(1e-13));
    CHECK(w[1] == doctest::Approx(0.65214515486254614 / 2.0).epsilon(1e-13));
}

TEST_CASE("gauss-legendre integrates polynomials up to degree 2n-1 exactly") {
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    for (int deg = 0; deg <= 9; ++deg) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
        const double exact = (deg % 2) ? 0.0 : 1.0 / (deg + 1);  // E[x^deg], uniform [-1,1]
        CHECK(s == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("uniform box quadrature reproduces box moments") {
    auto dist = LambdaDistribution::uniform_box({0.0, 1.0}, {2.0, 3.0});
    auto rule = dist.quadrature(4);
    CHECK(rule.size() == 16);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-13));
    const double m1 = expect(rule, [](std::span<const double> l) { return l[0]; });
    const double m2 = expect(rule, [](std::span<const double> l) { return l[1] * l[1]; });
    CHECK(m1 == doctest::Approx(1.0));
    CHECK(m2 == doctest::Approx((27.0 - 1.0) / (3.0 * 2.0)));  // E[y^2] on [1,3]
}

TEST_CASE("gauss-jacobi rule matches beta moments") {
    auto dist = LambdaDistribution::beta(3.0, 7.0);
    auto rule = dist.quadrature(8);
    REQUIRE(rule.size() == 8);
    for (auto& node : rule.nodes) {
        CHECK(node[0] > 0.0);
        CHECK(node[0] < 1.0);
    }
    for (int k = 1; k <= 5; ++k) {
        const double m = expect(rule, [k](std::span<const double> l) {
            double v = 1.0;
            for (int i = 0; i < k; ++i) v *= l[0];
            return v;
        });
        CHECK(m == doctest::Approx(beta_moment(3.0, 7.0, k)).epsilon(1e-11));
    }
}

TEST_CASE("beta sampling concentrates on the right mean") {
    auto dist = LambdaDistribution::beta(3.0, 7.0);
    Rng rng(42);
    const int n = 20000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = dist.sample(rng)[0];
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(0.3).epsilon(0.02));
    CHECK(var == doctest::Approx(3.0 * 7.0 / (100.0 * 11.0)).epsilon(0.05));
}

TEST_CASE("uniform sampling stays inside the box and is deterministic by seed") {
    auto dist = LambdaDistribution::uniform_box({-1.0, 0.5}, {1.0, 2.0});
    Rng a(7), b(7), c(8);
    auto s1 = dist.sample(a);
    auto s2 = dist.sample(b);
    auto s3 = dist.sample(c);
    CHECK(s1 == s2);
    CHECK(s1 != s3);
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        auto s = dist.sample(rng);
        CHECK(s[0] >= -1.0);
        CHECK(s[0] <= 1.0);
        CHECK(s[1] >= 0.5);
        CHECK(s[1] <= 2.0);
    }
}

TEST_CASE("tensor 2d quadrature is the product rule") {
    auto dist = LambdaDistribution::tensor_uniform_2d({0.0, 0.0}, {1.0, 2.0});
    auto rule = dist.quadrature(3);
    CHECK(rule.size() == 9);
    CHECK(rule.order_per_axis == 3);
    const double mxy = expect(rule, [](std::span<const double> l) { return l[0] * l[1]; });
    CHECK(mxy == doctest::Approx(0.5 * 1.0));
}

TEST_CASE("sample rule has uniform weights and marks order zero") {
    auto dist = LambdaDistribution::uniform_box(std::vector<double>(12, 0.0),
                                                std::vector<double>(12, 1.0));
    auto rule = sample_rule(dist, 250, 123);
    CHECK(rule.size() == 250);
    CHECK(rule.order_per_axis == 0);
    for (double w : rule.weights) CHECK(w == doctest::Approx(1.0 / 250.0));
    auto again = sample_rule(dist, 250, 123);
    CHECK(rule.nodes == again.nodes);
}

TEST_CASE("expect flags non-finite integrands with the node") {
    auto dist = LambdaDistribution::uniform_box({0.0}, {1.0});
    auto rule = dist.quadrature(2);
    CHECK_THROWS_WITH_AS(
        (void)expect(rule, [](std::span<const double>) { return std::nan(""); }),
        doctest::Contains("not finite"), std::runtime_error);
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS(LambdaDistribution::uniform_box({1.0}, {0.0}));
    CHECK_THROWS(LambdaDistribution::beta(0.0, 1.0));
    CHECK_THROWS(LambdaDistribution::tensor_uniform_2d({0.0}, {1.0}));
    auto dist = LambdaDistribution::uniform_box({0.0}, {1.0});
    CHECK_THROWS(dist.quadrature(0));
}
