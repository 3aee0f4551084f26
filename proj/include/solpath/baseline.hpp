#pragma once

#include <vector>

#include "solpath/linalg.hpp"
#include "solpath/optimize.hpp"
#include "solpath/problems.hpp"

// Uniform-discretization benchmark: solve the problem on a uniform grid over
// the lambda box with a calibrated per-point gradient budget and interpolate
// piecewise-constantly (nearest neighbor).  Work scales as
// steps_per_point * points_per_axis^dim, the yardstick the path-learning
// frontier is compared against.

namespace solpath {

struct DiscretizationSchedule {
    double delta = 0.0;
    double c1 = 1.0;
    double c2 = 0.5;
    int points_per_axis = 0;  // ceil(1 / sqrt(delta))
    int steps_per_point = 0;  // ceil(c1 * ln(c2 / delta))

    long total_gradient_calls(int dim) const;
};

// Requires 0 < delta < c2 so the step count is positive.
DiscretizationSchedule make_schedule(double delta, double c1, double c2);

// Piecewise-constant path over a uniform grid: lookup returns the solution at
// the nearest grid node, ties broken toward the lower index.
class PiecewisePath {
  public:
    PiecewisePath(std::vector<double> lo, std::vector<double> hi, int points_per_axis, int d);

    int dim() const { return static_cast<int>(lo_.size()); }
    int points_per_axis() const { return n_; }
    std::size_t size() const { return solutions_.rows; }

    // Lexicographic node index -> lambda coordinates.
    std::vector<double> node(std::size_t index) const;
    double axis_coordinate(int axis, int i) const;

    std::span<double> solution(std::size_t index) { return solutions_.row(index); }
    std::span<const double> solution(std::size_t index) const { return solutions_.row(index); }

    std::size_t nearest_index(std::span<const double> lambda) const;
    std::vector<double> lookup(std::span<const double> lambda) const;

  private:
    std::vector<double> lo_, hi_;
    int n_ = 0;
    Matrix solutions_;  // size() x d, rows in lexicographic node order
};

struct BaselineRun {
    PiecewisePath path;
    RunTrace trace;  // one row per grid point, exact cumulative call counts
};

// Solves every grid node with steps_per_point fixed-step (1/L) gradient
// descent iterations, warm-starting each solve from the previous node's
// solution along a serpentine traversal (first node starts from zero).
BaselineRun run_discretization(const ParametricProblem& problem, const std::vector<double>& lo,
                               const std::vector<double>& hi,
                               const DiscretizationSchedule& schedule);

// max over grid nodes of h(path(lambda_i), lambda_i) - h(theta_star_i, lambda_i);
// theta_star rows align with the path's lexicographic node order.
double grid_pass_error(const PiecewisePath& path, const ParametricProblem& problem,
                       const Matrix& theta_star);

}  // namespace solpath
