#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "solpath/problems.hpp"
#include "solpath/rng.hpp"

using namespace solpath;

namespace {

// Central finite differences against the analytic gradient.
void check_gradient(const ParametricProblem& p, std::vector<double> theta,
                    const std::vector<double>& lambda, double tol = 1e-6) {
    const auto g = p.gradient(theta, lambda);
    const double h = 1e-6;
    for (int i = 0; i < p.dim_theta; ++i) {
        const double keep = theta[i];
        theta[i] = keep + h;
        const double up = p.value(theta, lambda);
        theta[i] = keep - h;
        const double dn = p.value(theta, lambda);
        theta[i] = keep;
        CHECK(g[i] == doctest::Approx((up - dn) / (2.0 * h)).epsilon(tol).scale(1.0));
    }
}

// Co-coercivity bracket: mu ||dt||^2 <= <dg, dt> <= L ||dt||^2.
void check_mu_L(const ParametricProblem& p, const std::vector<double>& lambda, Rng& rng) {
    std::vector<double> t1(p.dim_theta), t2(p.dim_theta);
    for (int rep = 0; rep < 8; ++rep) {
        for (int i = 0; i < p.dim_theta; ++i) {
            t1[i] = rng.uniform(-2.0, 2.0);
            t2[i] = t1[i] + rng.uniform(-1.0, 1.0);
        }
        const auto g1 = p.gradient(t1, lambda);
        const auto g2 = p.gradient(t2, lambda);
        double inner = 0.0, nrm = 0.0;
        for (int i = 0; i < p.dim_theta; ++i) {
            inner += (g1[i] - g2[i]) * (t1[i] - t2[i]);
            nrm += (t1[i] - t2[i]) * (t1[i] - t2[i]);
        }
        if (nrm == 0.0) continue;
        CHECK(inner >= p.mu * nrm * (1.0 - 1e-9));
        CHECK(inner <= p.L * nrm * (1.0 + 1e-9));
    }
}

std::string write_temp(const std::string& name, const std::string& body) {
    std::string path = std::string("/tmp/solpath_test_") + name;
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("toy paths evaluate their target curves") {
    CHECK(toy_path_value("identity", 0.7) == doctest::Approx(0.7));
    CHECK(toy_path_value("cubic", -0.5) == doctest::Approx(-0.125));
    CHECK(toy_path_value("quintic", 0.5) == doctest::Approx(0.03125));
    CHECK(toy_path_value("abs_cubed", -0.5) == doctest::Approx(0.125));
    CHECK_THROWS(toy_path_value("septic", 0.0));

    auto p = quadratic_toy_path("cubic");
    CHECK(p.dim_theta == 1);
    CHECK(p.mu == doctest::Approx(1.0));
    CHECK(p.L == doctest::Approx(1.0));
    std::vector<double> theta{0.5}, lam{1.0};
    CHECK(p.value(theta, lam) == doctest::Approx(0.5 * 0.25));
    CHECK(p.gradient(theta, lam)[0] == doctest::Approx(-0.5));
}

TEST_CASE("weighted logistic matches a hand-computed tiny instance") {
    ClassificationData data;
    data.x = Matrix(3, 1);
    data.x(0, 0) = 1.0;
    data.x(1, 0) = -2.0;
    data.x(2, 0) = 0.5;
    data.y = {1, 0, 0};
    auto p = weighted_logistic(data, 0.125);
    CHECK(p.dim_lambda == 1);
    CHECK(p.mu == doctest::Approx(0.25));

    const double theta = 0.3;
    const double lpos = std::log1p(std::exp(-1.0 * theta));
    const double lneg = 0.5 * (std::log1p(std::exp(-2.0 * theta)) +
                               std::log1p(std::exp(0.5 * theta)));
    const double lam = 0.25;
    const double expected =
        (1.0 - lam) * lpos + lam * lneg + 0.125 * theta * theta;
    std::vector<double> tv{theta}, lv{lam};
    CHECK(p.value(tv, lv) == doctest::Approx(expected).epsilon(1e-12));
    check_gradient(p, tv, lv);
}

TEST_CASE("weighted logistic rejects degenerate data") {
    ClassificationData ok;
    ok.x = Matrix(2, 1);
    ok.x(0, 0) = 1.0;
    ok.x(1, 0) = -1.0;
    ok.y = {1, 1};
    CHECK_THROWS(weighted_logistic(ok));  // one class missing
    ok.y = {1, 0};
    CHECK_THROWS(weighted_logistic(ok, 0.0));  // ridge must be positive
}

TEST_CASE("synthetic classification respects imbalance and seeding") {
    auto a = synth_classification(11, 2000, 5);
    auto b = synth_classification(11, 2000, 5);
    auto c = synth_classification(12, 2000, 5);
    CHECK(a.x.a == b.x.a);
    CHECK(a.y == b.y);
    CHECK(a.x.a != c.x.a);
    CHECK(a.positives() == 88);  // round(0.044 * 2000), exact-count labeling
    CHECK(a.negatives() == 1912);

    auto p = weighted_logistic(a);
    Rng rng(3);
    std::vector<double> lam{0.7};
    check_mu_L(p, lam, rng);
    std::vector<double> theta(p.dim_theta, 0.1);
    check_gradient(p, theta, lam);
}

TEST_CASE("synthetic market spectra stay inside the requested band") {
    auto m = synth_market(5, 8, 0.5, 1.5, 0.1);
    CHECK(m.d() == 8);
    auto ev = sym_eigenvalues(m.cov);
    CHECK(ev.front() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(ev.back() == doctest::Approx(1.5).epsilon(1e-9));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(m.cov(i, j) == doctest::Approx(m.cov(j, i)));
    for (double mu : m.mean) {
        CHECK(mu >= 0.05);
        CHECK(mu <= 0.15);
    }
    auto again = synth_market(5, 8, 0.5, 1.5, 0.1);
    CHECK(m.cov.a == again.cov.a);
}

TEST_CASE("portfolio_2d gradient and convexity certificates hold") {
    auto market = synth_market(21, 6);
    auto p = portfolio_2d(market, 0.2, 1.0);
    CHECK(p.dim_theta == 6);
    CHECK(p.dim_lambda == 2);
    auto ev = sym_eigenvalues(market.cov);
    CHECK(p.mu == doctest::Approx(2.0 * 0.2 * ev.front()));
    CHECK(p.L == doctest::Approx(2.0 * 1.0 * ev.back() + 100.0));

    std::vector<double> theta{0.1, -0.2, 0.3, 0.0, -0.05, 0.15};
    std::vector<double> lam{0.6, 0.8};
    check_gradient(p, theta, lam, 1e-5);
    Rng rng(4);
    check_mu_L(p, lam, rng);
    check_mu_L(p, std::vector<double>{0.0, 0.2}, rng);
    check_mu_L(p, std::vector<double>{1.0, 1.0}, rng);
}

TEST_CASE("portfolio_12d analytic path zeroes the gradient") {
    auto market = synth_market(33, 10);
    auto p = portfolio_12d(market);
    CHECK(p.dim_theta == 10);
    CHECK(p.dim_lambda == 12);

    Rng rng(6);
    std::vector<double> lam(12);
    for (int rep = 0; rep < 5; ++rep) {
        lam[0] = rng.uniform01();
        lam[1] = rng.uniform(0.2, 1.0);
        for (int k = 2; k < 12; ++k) lam[k] = rng.uniform01();
        std::vector<double> theta(10);
        analytic_path_12d(market, lam, theta);
        const auto g = p.gradient(theta, lam);
        for (double gi : g) CHECK(std::fabs(gi) < 1e-10);
    }
    std::vector<double> theta(10, 0.05);
    check_gradient(p, theta, lam, 1e-5);
    check_mu_L(p, lam, rng);
}

TEST_CASE("classification csv round-trips and validates labels") {
    const std::string good = write_temp("cls_good.csv",
                                        "1,0.5,-1.0\n"
                                        "0,2.0,0.25\n"
                                        "0,-0.5,1.5\n");
    auto data = ingest_classification_csv(good);
    CHECK(data.x.rows == 3);
    CHECK(data.x.cols == 2);
    CHECK(data.y[0] == 1);
    CHECK(data.x(1, 1) == doctest::Approx(0.25));
    CHECK(data.positives() == 1);

    const std::string bad = write_temp("cls_bad.csv", "2,0.5\n0,1.0\n");
    CHECK_THROWS_WITH_AS((void)ingest_classification_csv(bad), doctest::Contains("label"),
                         std::runtime_error);
    std::remove(good.c_str());
    std::remove(bad.c_str());
}

TEST_CASE("returns csv produces a psd market model") {
    std::string body;
    Rng rng(17);
    for (int t = 0; t < 40; ++t) {
        for (int j = 0; j < 3; ++j) body += (j ? "," : "") + std::to_string(0.01 * rng.normal());
        body += "\n";
    }
    const std::string path = write_temp("returns.csv", body);
    auto m = ingest_returns_csv(path);
    CHECK(m.d() == 3);
    auto ev = sym_eigenvalues(m.cov);
    CHECK(ev.front() >= 0.0);
    std::remove(path.c_str());
}
