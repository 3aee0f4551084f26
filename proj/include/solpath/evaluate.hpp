#pragma once

#include <functional>
#include <string>
#include <vector>

#include "solpath/basis.hpp"
#include "solpath/distribution.hpp"
#include "solpath/linalg.hpp"
#include "solpath/optimize.hpp"
#include "solpath/problems.hpp"

// Measurement and audit layer: ground-truth solution grids, path-error
// evaluation, second-moment and decomposition inequality audits, and
// Chebyshev coefficient decay analysis.

namespace solpath {

struct GroundTruthGrid {
    std::string problem_name;
    std::vector<std::vector<double>> nodes;  // n x dim_lambda
    Matrix theta;                            // n x d, theta*(lambda_i)
    std::vector<double> h_star;              // h(theta*_i, lambda_i)
    std::vector<double> residual;            // ||grad h(theta*_i, lambda_i)||

    std::size_t size() const { return nodes.size(); }
    int dim_lambda() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().size()); }
    int d() const { return static_cast<int>(theta.cols); }
    double max_residual() const;
};

struct GroundTruthSpec {
    long iterations = 5000;      // warm-started gradient-descent budget per node
    double grad_tol = 1e-12;     // early stop once the solve is certified
    double residual_tol = 1e-7;  // optimality certificate threshold
    bool enforce_residual = true;
};

// Uniform grid over a box, lexicographic node order, endpoints included
// (single-point axes sit at the center).
std::vector<std::vector<double>> uniform_grid_nodes(const std::vector<double>& lo,
                                                    const std::vector<double>& hi,
                                                    const std::vector<int>& points_per_axis);

// Warm-started fixed-step (1/L) gradient descent along the node list, in the
// given order; throws naming the first node whose residual certificate fails.
GroundTruthGrid compute_ground_truth(const ParametricProblem& problem,
                                     const std::vector<std::vector<double>>& nodes,
                                     const GroundTruthSpec& spec = {});

// Closed-form path for the 12-dimensional portfolio family, certified by the
// problem's own residuals.
GroundTruthGrid analytic_ground_truth_12d(const ParametricProblem& problem,
                                          const MarketModel& market,
                                          const std::vector<std::vector<double>>& nodes);

void ground_truth_to_csv(const GroundTruthGrid& grid, const std::string& path);
GroundTruthGrid ground_truth_from_csv(const std::string& path);

struct PathErrorReport {
    double eps_sp = 0.0;        // max gap over the truth grid
    std::size_t argmax = 0;     // node attaining it
    std::vector<double> gaps;   // per-node h(path) - h*
};

using PathCallable = std::function<std::vector<double>(std::span<const double>)>;

PathErrorReport path_error(const ParametricProblem& problem, const PathCallable& path,
                           const GroundTruthGrid& truth);
PathErrorReport path_error(const ParametricProblem& problem, const Basis& basis,
                           std::span<const double> beta_values, const GroundTruthGrid& truth);

// Max gap only; allocation-free per node, suitable for optimizer checkpoints.
double path_error_sup(const ParametricProblem& problem, const Basis& basis,
                      std::span<const double> beta_values, const GroundTruthGrid& truth);

struct SpectralConstants {
    double C = 0.0;
    double c = 0.0;
    double L = 0.0;
    double mu = 0.0;
};

struct AuditRow {
    long sample = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
};

struct AuditReport {
    std::string kind;  // "rwgc" or "decomposition"
    std::vector<AuditRow> rows;
    double min_slack = 0.0;
    bool pass = false;
    SpectralConstants constants;
    double eps_star_ub = 0.0;
    double f_star = 0.0;          // quadrature objective at beta*_avg
    double f_star_grad_norm = 0.0;  // gradient norm certified for beta*_avg
};

// Gaussian coefficient clouds around a center, for audit sampling.
std::vector<Coefficients> sample_betas(const Basis& basis, const Coefficients& center, int n,
                                       double radius, std::uint64_t seed);

// Second-moment growth audit: for every sampled beta checks
//   E||Phi' grad h||^2 <= 2 C L (F(beta) - F*) + 2 C L eps_star_ub
// with all expectations taken over `rule`.  Pass `constants` to override the
// measured C/c/L/mu (negative controls); zero fields mean "measure".
AuditReport rwgc_audit(const ParametricProblem& problem, const Basis& basis,
                       const QuadratureRule& rule, const std::vector<Coefficients>& betas,
                       double eps_star_ub, const SpectralConstants* constants = nullptr);

// Path-error decomposition audit: checks
//   eps_sp(beta) <= 2 C L ||beta - beta*_avg||^2 + (8 C L / (c mu)) eps_star_ub
// with eps_sp measured against `truth`.
AuditReport decomposition_audit(const ParametricProblem& problem, const Basis& basis,
                                const QuadratureRule& rule, const GroundTruthGrid& truth,
                                const std::vector<Coefficients>& betas, double eps_star_ub,
                                const SpectralConstants* constants = nullptr);

void audit_to_csv(const AuditReport& report, const std::string& path);

// Chebyshev interpolation coefficients a_0..a_degree of f on [-1, 1] from
// degree+1 Chebyshev-Lobatto samples (cosine-transform identity).
std::vector<double> chebyshev_coeffs(const std::function<double(double)>& f, int degree);

// Clenshaw evaluation of sum a_n T_n(x).
double chebyshev_eval(std::span<const double> coeffs, double x);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n = 0;
};

// Ordinary least squares y ~ slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct DecayFit {
    double omega = 1.0;    // geometric rate: |a_n| ~ omega^{-n}
    double order = 0.0;    // algebraic truncation-error order: |a_n| ~ n^{-(order+1)}
    double r2_geometric = 0.0;
    double r2_algebraic = 0.0;
    int points = 0;  // coefficients entering the fits
};

// Regresses log|a_n| on n (geometric) and on log n (algebraic) over the
// nonzero tail n >= n_min, ignoring entries below rel_floor * max|a|.
DecayFit decay_fit(std::span<const double> coeffs, int n_min = 2, double rel_floor = 1e-13);

// Upper bound on the minimal path error of a degree-`degree` polynomial
// approximation: (d L / 2) * (max over theta coordinates of the sup
// truncation error on the grid)^2.  1-D lambda only; the measured path is
// carried to Chebyshev-Lobatto points by linear interpolation.
double truncation_path_error_bound(const GroundTruthGrid& truth, int degree, double L,
                                   int cheb_samples = 256);

}  // namespace solpath
