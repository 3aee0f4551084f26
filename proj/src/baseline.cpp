#include "solpath/baseline.hpp"

#include <cmath>
#include <stdexcept>

namespace solpath {

long DiscretizationSchedule::total_gradient_calls(int dim) const {
    long pts = 1;
    for (int k = 0; k < dim; ++k) pts *= points_per_axis;
    return static_cast<long>(steps_per_point) * pts;
}

DiscretizationSchedule make_schedule(double delta, double c1, double c2) {
    if (!(delta > 0.0)) throw std::invalid_argument("make_schedule: delta must be positive");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("make_schedule: c1, c2 must be positive");
    if (delta >= c2)
        throw std::invalid_argument("make_schedule: delta must be < c2 (step count would be nonpositive)");
    DiscretizationSchedule s;
    s.delta = delta;
    s.c1 = c1;
    s.c2 = c2;
    s.points_per_axis = static_cast<int>(std::ceil(1.0 / std::sqrt(delta)));
    s.steps_per_point = static_cast<int>(std::ceil(c1 * std::log(c2 / delta)));
    return s;
}

PiecewisePath::PiecewisePath(std::vector<double> lo, std::vector<double> hi, int points_per_axis,
                             int d)
    : lo_(std::move(lo)), hi_(std::move(hi)), n_(points_per_axis) {
    if (lo_.size() != hi_.size() || lo_.empty())
        throw std::invalid_argument("PiecewisePath: bad box");
    for (std::size_t k = 0; k < lo_.size(); ++k)
        if (!(lo_[k] < hi_[k])) throw std::invalid_argument("PiecewisePath: empty box axis");
    if (n_ < 1) throw std::invalid_argument("PiecewisePath: need at least one point per axis");
    if (d < 1) throw std::invalid_argument("PiecewisePath: need positive solution dimension");
    std::size_t total = 1;
    for (std::size_t k = 0; k < lo_.size(); ++k) total *= static_cast<std::size_t>(n_);
    solutions_ = Matrix(total, static_cast<std::size_t>(d));
}

double PiecewisePath::axis_coordinate(int axis, int i) const {
    const double lo = lo_[static_cast<std::size_t>(axis)];
    const double hi = hi_[static_cast<std::size_t>(axis)];
    if (n_ == 1) return 0.5 * (lo + hi);  // a one-point grid sits at the center
    return lo + (hi - lo) * static_cast<double>(i) / (n_ - 1);
}

std::vector<double> PiecewisePath::node(std::size_t index) const {
    const int dim = this->dim();
    std::vector<double> lam(static_cast<std::size_t>(dim));
    for (int k = dim - 1; k >= 0; --k) {
        lam[static_cast<std::size_t>(k)] =
            axis_coordinate(k, static_cast<int>(index % static_cast<std::size_t>(n_)));
        index /= static_cast<std::size_t>(n_);
    }
    return lam;
}

std::size_t PiecewisePath::nearest_index(std::span<const double> lambda) const {
    if (static_cast<int>(lambda.size()) != dim())
        throw std::invalid_argument("PiecewisePath: lambda dimension mismatch");
    std::size_t idx = 0;
    for (int k = 0; k < dim(); ++k) {
        int i = 0;
        if (n_ > 1) {
            const double lo = lo_[static_cast<std::size_t>(k)];
            const double hi = hi_[static_cast<std::size_t>(k)];
            const double u = (lambda[static_cast<std::size_t>(k)] - lo) / (hi - lo) * (n_ - 1);
            // Round half down so ties go to the lower-index node.
            i = static_cast<int>(std::ceil(u - 0.5));
            i = std::max(0, std::min(n_ - 1, i));
        }
        idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return idx;
}

std::vector<double> PiecewisePath::lookup(std::span<const double> lambda) const {
    auto row = solutions_.row(nearest_index(lambda));
    return std::vector<double>(row.begin(), row.end());
}

BaselineRun run_discretization(const ParametricProblem& problem, const std::vector<double>& lo,
                               const std::vector<double>& hi,
                               const DiscretizationSchedule& schedule) {
    if (static_cast<int>(lo.size()) != problem.dim_lambda || lo.size() != hi.size())
        throw std::invalid_argument("run_discretization: box dimension mismatch");
    if (schedule.points_per_axis < 1)
        throw std::invalid_argument("run_discretization: schedule has no grid points");
    if (schedule.steps_per_point < 0)
        throw std::invalid_argument("run_discretization: negative step count");

    const int dim = problem.dim_lambda;
    const int n = schedule.points_per_axis;
    const double step = 1.0 / problem.L;
    BaselineRun run{PiecewisePath(lo, hi, n, problem.dim_theta), RunTrace{}};

    std::vector<double> theta(static_cast<std::size_t>(problem.dim_theta), 0.0);
    std::vector<double> grad(static_cast<std::size_t>(problem.dim_theta));
    std::vector<int> pos(static_cast<std::size_t>(dim), 0);
    std::vector<int> dir(static_cast<std::size_t>(dim), 1);  // serpentine per-axis direction
    std::size_t total = run.path.size();
    long calls = 0;

    for (std::size_t visit = 0; visit < total; ++visit) {
        std::vector<double> lam(static_cast<std::size_t>(dim));
        std::size_t idx = 0;
        for (int k = 0; k < dim; ++k) {
            lam[static_cast<std::size_t>(k)] = run.path.axis_coordinate(k, pos[static_cast<std::size_t>(k)]);
            idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(pos[static_cast<std::size_t>(k)]);
        }
        for (int s = 0; s < schedule.steps_per_point; ++s) {
            problem.value_grad(theta, lam, std::span<double>(grad));
            ++calls;
            for (int i = 0; i < problem.dim_theta; ++i)
                theta[static_cast<std::size_t>(i)] -= step * grad[static_cast<std::size_t>(i)];
        }
        auto dst = run.path.solution(idx);
        for (int i = 0; i < problem.dim_theta; ++i) dst[static_cast<std::size_t>(i)] = theta[static_cast<std::size_t>(i)];

        TraceRow row;
        row.iteration = static_cast<long>(visit) + 1;
        row.gradient_calls = calls;
        row.step_size = step;
        run.trace.rows.push_back(row);

        // Advance the serpentine odometer: flip the innermost axis direction
        // on carry so consecutive nodes always differ by one grid step.
        for (int k = dim - 1; k >= 0; --k) {
            int next = pos[static_cast<std::size_t>(k)] + dir[static_cast<std::size_t>(k)];
            if (next >= 0 && next < n) {
                pos[static_cast<std::size_t>(k)] = next;
                break;
            }
            dir[static_cast<std::size_t>(k)] = -dir[static_cast<std::size_t>(k)];
        }
    }
    run.trace.gradient_calls = calls;
    return run;
}

double grid_pass_error(const PiecewisePath& path, const ParametricProblem& problem,
                       const Matrix& theta_star) {
    if (theta_star.rows != path.size() ||
        theta_star.cols != static_cast<std::size_t>(problem.dim_theta))
        throw std::invalid_argument("grid_pass_error: ground truth shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const std::vector<double> lam = path.node(i);
        const double got = problem.value(path.solution(i), lam);
        const double best = problem.value(theta_star.row(i), lam);
        worst = std::max(worst, got - best);
    }
    return worst;
}

}  // namespace solpath
