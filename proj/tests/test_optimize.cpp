#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "solpath/optimize.hpp"

using namespace solpath;

namespace {

ParametricProblem identity_toy() { return quadratic_toy_path("identity"); }

}  // namespace

TEST_CASE("sgd_step applies the pulled-back gradient") {
    auto p = identity_toy();
    Basis b = Basis::legendre(2, 1);
    Coefficients beta = b.zeros();
    // grad_h at theta=0, lambda=1 is theta - lambda = -1; psi(1) = (1, 1);
    // beta' = beta + eta * psi = (0.5, 0.5) at eta = 0.5.
    sgd_step(p, b, std::vector<double>{1.0}, 0.5, beta);
    CHECK(beta.values[0] == doctest::Approx(0.5));
    CHECK(beta.values[1] == doctest::Approx(0.5));
    // Second step from (0.5, 0.5) at lambda = 0: theta = 0.25... psi = (1, 0),
    // grad = theta - 0 = 0.5 - 0*... = Phi beta = 0.5.
    sgd_step(p, b, std::vector<double>{0.0}, 0.5, beta);
    CHECK(beta.values[0] == doctest::Approx(0.25));
    CHECK(beta.values[1] == doctest::Approx(0.5));
}

TEST_CASE("run_sgd converges on the identity path and records a trace") {
    auto p = identity_toy();
    Basis b = Basis::legendre(2, 1);
    auto dist = LambdaDistribution::uniform_box({-1.0}, {1.0});
    SgdConfig cfg;
    cfg.iterations = 5000;
    cfg.seed = 1;
    cfg.record_every = 500;
    auto rule = dist.quadrature(8);
    CheckpointHooks hooks;
    hooks.objective = [&](std::span<const double> beta) {
        return fhat_value(p, b, rule, beta);
    };
    auto res = run_sgd(p, b, dist, cfg, b.zeros(), 0.0, &hooks);

    CHECK(res.C_used == doctest::Approx(2.0));  // sup ||psi||^2 = q at the endpoints
    CHECK(res.final_step == doctest::Approx(0.5));
    CHECK_FALSE(res.trace.diverged);
    CHECK(res.trace.gradient_calls == 5000);
    REQUIRE(res.trace.rows.size() == 11);  // t = 0, 500, ..., 5000
    CHECK(res.trace.rows.front().iteration == 0);
    CHECK(res.trace.rows.back().iteration == 5000);
    CHECK(res.trace.rows.front().has_objective);
    // F(0) = E[0.5 lambda^2] = 1/6; the plateau should sit far below it.
    CHECK(res.trace.rows.front().objective == doctest::Approx(1.0 / 6.0));
    CHECK(res.trace.rows.back().objective < 1e-4);
    // identity path is spanned exactly: beta -> (0, 1)
    CHECK(res.beta.values[0] == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
    CHECK(res.beta.values[1] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("run_sgd is deterministic in the seed") {
    auto p = identity_toy();
    Basis b = Basis::legendre(3, 1);
    auto dist = LambdaDistribution::uniform_box({-1.0}, {1.0});
    SgdConfig cfg;
    cfg.iterations = 400;
    cfg.seed = 9;
    auto r1 = run_sgd(p, b, dist, cfg, b.zeros());
    auto r2 = run_sgd(p, b, dist, cfg, b.zeros());
    CHECK(r1.beta.values == r2.beta.values);
    cfg.seed = 10;
    auto r3 = run_sgd(p, b, dist, cfg, b.zeros());
    CHECK(r1.beta.values != r3.beta.values);
}

TEST_CASE("run_sgd flags divergence instead of emitting NaNs") {
    // A manually inflated step turns the quadratic contraction into an
    // expansion; the run must stop at a checkpoint with a note.
    auto p = identity_toy();
    Basis b = Basis::legendre(2, 1);
    auto dist = LambdaDistribution::uniform_box({-1.0}, {1.0});
    SgdConfig cfg;
    cfg.iterations = 2000;
    cfg.record_every = 50;
    cfg.eta_bar = 1.0;
    // Lie about C: claiming C = 0.05 yields eta = 10 >> 2/L.
    auto res = run_sgd(p, b, dist, cfg, b.zeros(), 0.05);
    CHECK(res.trace.diverged);
    CHECK_FALSE(res.trace.divergence_note.empty());
    for (double v : res.beta.values) CHECK(std::isfinite(v));
    CHECK(res.trace.gradient_calls < 2000);
}

TEST_CASE("eta_bar outside (0, 1] is rejected") {
    auto p = identity_toy();
    Basis b = Basis::legendre(2, 1);
    auto dist = LambdaDistribution::uniform_box({-1.0}, {1.0});
    SgdConfig cfg;
    cfg.eta_bar = 0.0;
    CHECK_THROWS(run_sgd(p, b, dist, cfg, b.zeros()));
    cfg.eta_bar = 1.5;
    CHECK_THROWS(run_sgd(p, b, dist, cfg, b.zeros()));
}

TEST_CASE("distance diagnostic halves the step when growth stalls") {
    DistanceDiagnosticConfig cfg;
    cfg.enabled = true;
    cfg.q_diag = 1.3;
    cfg.reduction = 0.5;
    std::vector<double> anchor{0.0, 0.0};
    DistanceDiagnostic diag(cfg, anchor, 1.0);

    // The iterate never moves: every completed checkpoint pair fails the
    // growth test and halves the step.
    double eta = 1.0;
    std::vector<double> frozen{1.0, 0.0};
    long t = diag.next_checkpoint();
    eta = diag.observe(t, frozen);
    CHECK(eta == doctest::Approx(1.0));  // first checkpoint only seeds prev_dist
    t = diag.next_checkpoint();
    eta = diag.observe(t, frozen);
    CHECK(eta == doctest::Approx(0.5));
    // Growing distances keep the step.
    DistanceDiagnostic diag2(cfg, anchor, 1.0);
    std::vector<double> beta{1.0, 0.0};
    for (int k = 0; k < 6; ++k) {
        beta[0] *= 2.0;
        eta = diag2.observe(diag2.next_checkpoint(), beta);
    }
    CHECK(eta == doctest::Approx(1.0));
}

TEST_CASE("gd_solve reaches the analytic minimizer with certificate") {
    auto m10 = synth_market(2, 10);
    auto p = portfolio_12d(m10);
    std::vector<double> lam(12, 0.5);
    lam[1] = 0.7;
    std::vector<double> theta0(10, 0.0);
    auto res = gd_solve(p, lam, theta0, 5000, 1.0 / p.L, 1e-12);
    std::vector<double> exact(10);
    analytic_path_12d(m10, lam, exact);
    for (int i = 0; i < 10; ++i) CHECK(res.theta[i] == doctest::Approx(exact[i]).epsilon(1e-8));
    CHECK(res.grad_norm <= 1e-12);
    CHECK(res.iterations < 5000);
}

TEST_CASE("fhat gradient matches finite differences and its minimizer is stationary") {
    auto p = quadratic_toy_path("cubic");
    Basis b = Basis::legendre(3, 1);
    auto dist = LambdaDistribution::uniform_box({-1.0}, {1.0});
    auto rule = dist.quadrature(8);

    std::vector<double> beta{0.3, -0.2, 0.5};
    auto g = fhat_gradient(p, b, rule, beta);
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
        auto up = beta, dn = beta;
        up[k] += h;
        dn[k] -= h;
        const double fd = (fhat_value(p, b, rule, up) - fhat_value(p, b, rule, dn)) / (2 * h);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
    }

    auto best = gd_minimize_fhat(p, b, rule);
    auto gb = fhat_gradient(p, b, rule, best.values);
    CHECK(norm2(gb) <= 1e-9);
    // Legendre projection of lambda^3: 0.6 P_1 + 0.4 P_3; with q = 3 the cubic
    // term is unreachable and the best fit keeps the P_1 share.
    CHECK(best.values[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    CHECK(best.values[1] == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(best.values[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}
