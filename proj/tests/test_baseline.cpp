#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "solpath/baseline.hpp"
#include "solpath/evaluate.hpp"

using namespace solpath;

TEST_CASE("schedule counts follow the calibration formulas") {
    auto s = make_schedule(0.02, 1.0, 1.0);
    CHECK(s.points_per_axis == 8);   // ceil(1 / sqrt(0.02)) = ceil(7.07)
    CHECK(s.steps_per_point == 4);   // ceil(ln 50) = ceil(3.91)
    CHECK(s.total_gradient_calls(1) == 32);
    CHECK(s.total_gradient_calls(2) == 256);

    auto t = make_schedule(0.01, 2.0, 4.0);
    CHECK(t.points_per_axis == 10);
    CHECK(t.steps_per_point == 12);  // ceil(2 ln 400) = ceil(11.98)

    auto u = make_schedule(0.0625, 0.65, 1.0);
    CHECK(u.points_per_axis == 4);
    CHECK(u.steps_per_point == 2);   // ceil(0.65 ln 16) = ceil(1.80)

    auto v = make_schedule(0.5 / std::exp(1.0), 1.0, 0.5);
    CHECK(v.steps_per_point == 1);   // ln(c2 / delta) = 1 exactly

    CHECK_THROWS(make_schedule(0.5, 1.0, 0.5));   // delta >= c2
    CHECK_THROWS(make_schedule(0.0, 1.0, 0.5));
}

TEST_CASE("piecewise path nodes and nearest lookup with ties to the lower index") {
    PiecewisePath path({0.0}, {1.0}, 5, 1);
    CHECK(path.size() == 5);
    CHECK(path.axis_coordinate(0, 0) == doctest::Approx(0.0));
    CHECK(path.axis_coordinate(0, 4) == doctest::Approx(1.0));
    CHECK(path.node(2)[0] == doctest::Approx(0.5));

    CHECK(path.nearest_index(std::vector<double>{0.0}) == 0);
    CHECK(path.nearest_index(std::vector<double>{0.12}) == 0);
    CHECK(path.nearest_index(std::vector<double>{0.13}) == 1);
    // 0.125 is equidistant between nodes 0 and 1: lower wins.
    CHECK(path.nearest_index(std::vector<double>{0.125}) == 0);
    CHECK(path.nearest_index(std::vector<double>{0.99}) == 4);
}

TEST_CASE("single-point axes collapse to the box center") {
    PiecewisePath path({0.0}, {2.0}, 1, 3);
    CHECK(path.size() == 1);
    CHECK(path.node(0)[0] == doctest::Approx(1.0));
    CHECK(path.nearest_index(std::vector<double>{1.9}) == 0);
}

TEST_CASE("two axis path uses lexicographic node order") {
    PiecewisePath path({0.0, 10.0}, {1.0, 12.0}, 3, 1);
    CHECK(path.size() == 9);
    // Last axis varies fastest.
    CHECK(path.node(0) == std::vector<double>{0.0, 10.0});
    CHECK(path.node(1) == std::vector<double>{0.0, 11.0});
    CHECK(path.node(3) == std::vector<double>{0.5, 10.0});
    CHECK(path.nearest_index(std::vector<double>{0.6, 11.4}) == 4);
}

TEST_CASE("discretization run spends exactly the scheduled budget") {
    auto p = quadratic_toy_path("identity");
    auto s = make_schedule(4e-4, 1.0, 0.5);
    CHECK(s.points_per_axis == 50);
    auto run = run_discretization(p, {-1.0}, {1.0}, s);
    CHECK(run.path.size() == 50);
    REQUIRE(run.trace.rows.size() == 50);
    CHECK(run.trace.gradient_calls == s.total_gradient_calls(1));
    // Cumulative call counts advance by exactly steps_per_point per node.
    for (std::size_t i = 0; i < run.trace.rows.size(); ++i)
        CHECK(run.trace.rows[i].gradient_calls ==
              static_cast<long>(i + 1) * s.steps_per_point);
}

TEST_CASE("warm starts let few steps per point track a smooth path") {
    auto p = quadratic_toy_path("cubic");
    auto s = make_schedule(1e-4, 2.0, 0.5);
    auto run = run_discretization(p, {-1.0}, {1.0}, s);
    // Each node's solve should land very close to the true minimizer because
    // neighbors differ little and the warm start carries over.
    for (std::size_t i = 0; i < run.path.size(); ++i) {
        const double lam = run.path.node(i)[0];
        CHECK(run.path.solution(i)[0] ==
              doctest::Approx(toy_path_value("cubic", lam)).scale(1.0).epsilon(5e-3));
    }
}

TEST_CASE("grid pass error vanishes on the spanning grid and reflects gaps off it") {
    auto p = quadratic_toy_path("identity");
    auto s = make_schedule(0.01, 1.0, 0.5);
    auto run = run_discretization(p, {-1.0}, {1.0}, s);

    const std::size_t n = run.path.size();
    Matrix star(n, 1);
    for (std::size_t i = 0; i < n; ++i) star(i, 0) = run.path.node(i)[0];
    const double on_grid = grid_pass_error(run.path, p, star);
    CHECK(on_grid >= 0.0);
    CHECK(on_grid < 1e-4);

    // On a refined grid the piecewise-constant path pays ~ (spacing/2)^2 / 2.
    auto truth = compute_ground_truth(p, uniform_grid_nodes({-1.0}, {1.0}, {1001}));
    auto report = path_error(
        p, [&](std::span<const double> lam) { return run.path.lookup(lam); }, truth);
    const double spacing = 2.0 / (n - 1.0);
    CHECK(report.eps_sp > 0.1 * 0.5 * 0.25 * spacing * spacing);
    CHECK(report.eps_sp < 2.0 * 0.5 * 0.25 * spacing * spacing + 1e-6);
}

TEST_CASE("2d traversal is serpentine so consecutive solves stay adjacent") {
    auto market = synth_market(13, 4);
    auto p = portfolio_2d(market);
    DiscretizationSchedule s = make_schedule(0.05, 1.0, 0.5);
    CHECK(s.points_per_axis == 5);
    const std::vector<double> lo{0.0, 0.2}, hi{1.0, 1.0};
    auto run = run_discretization(p, lo, hi, s);
    CHECK(run.path.size() == 25);
    CHECK(run.trace.gradient_calls == s.total_gradient_calls(2));
    REQUIRE(run.trace.rows.size() == 25);

    // Replay the boustrophedon chain independently: the inner axis zigzags so
    // each warm start moves one grid step.  A lexicographic traversal would
    // produce different solutions at the row wrap-arounds.
    const int n = s.points_per_axis;
    std::vector<double> theta(4, 0.0), grad(4);
    Matrix expect(25, 4);
    int j = 0, dj = 1;
    for (int i = 0; i < n; ++i) {
        for (int cnt = 0; cnt < n; ++cnt) {
            std::vector<double> lam{lo[0] + i * (hi[0] - lo[0]) / (n - 1.0),
                                    lo[1] + j * (hi[1] - lo[1]) / (n - 1.0)};
            for (int step = 0; step < s.steps_per_point; ++step) {
                p.value_grad(theta, lam, std::span<double>(grad));
                for (int k = 0; k < 4; ++k) theta[k] -= grad[k] / p.L;
            }
            for (int k = 0; k < 4; ++k) expect(i * n + j, k) = theta[k];
            if (cnt + 1 < n) j += dj;
        }
        dj = -dj;
    }
    for (std::size_t node = 0; node < 25; ++node)
        for (int k = 0; k < 4; ++k)
            CHECK(run.path.solution(node)[k] == doctest::Approx(expect(node, k)).epsilon(1e-12));
}
