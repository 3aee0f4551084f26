#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "solpath/basis.hpp"
#include "solpath/distribution.hpp"
#include "solpath/problems.hpp"

// First-order methods: projected-free SGD on the stochastic reformulation
//   F(beta) = E_{lambda ~ P}[ h(Phi(lambda) beta, lambda) ],
// whose stochastic gradient at a draw lambda is Phi(lambda)' grad_h, plus the
// deterministic gradient-descent helpers used for per-point solves and
// quadrature objectives.

namespace solpath {

struct TraceRow {
    long iteration = 0;
    long gradient_calls = 0;
    double step_size = 0.0;
    double objective = 0.0;   // quadrature/sample estimate of F, if recorded
    double path_error = 0.0;  // sup-gap against ground truth, if recorded
    int stage = 0;            // basis stage (constant 0 outside ALSP)
    bool has_objective = false;
    bool has_path_error = false;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    long gradient_calls = 0;
    bool diverged = false;
    std::string divergence_note;
};

struct DistanceDiagnosticConfig {
    bool enabled = false;
    double q_diag = 1.3;      // checkpoint spacing ratio and growth threshold
    double reduction = 0.5;   // step multiplier applied on a failed growth check
};

// Restart-free step-size controller: iterate distance from an anchor is
// inspected at geometrically spaced checkpoints; when the distance fails to
// grow by the threshold factor, the iterate is deemed to be bouncing around a
// noise ball, the step is cut, and the anchor resets.
class DistanceDiagnostic {
  public:
    DistanceDiagnostic(const DistanceDiagnosticConfig& cfg, std::span<const double> beta0,
                       double eta0);

    // Call after iteration t (1-based) with the current iterate; returns the
    // step size to use from now on.
    double observe(long t, std::span<const double> beta);

    double eta() const { return eta_; }
    long next_checkpoint() const { return next_cp_; }
    void reset(std::span<const double> beta, double eta, long t_now);

  private:
    DistanceDiagnosticConfig cfg_;
    std::vector<double> anchor_;
    double eta_;
    double next_cp_real_ = 1.0;
    long next_cp_ = 1;
    double prev_dist_ = -1.0;  // negative: no completed checkpoint since anchor
};

struct SgdConfig {
    double eta_bar = 1.0;  // eta = eta_bar / (C * L), eta_bar in (0, 1]
    long iterations = 10000;
    std::uint64_t seed = 0;
    long record_every = 100;
    DistanceDiagnosticConfig diagnostic;
};

// Optional per-checkpoint measurements recorded into the trace.
struct CheckpointHooks {
    std::function<double(std::span<const double> beta_values)> objective;
    std::function<double(std::span<const double> beta_values)> path_error;
};

struct SgdResult {
    Coefficients beta;
    RunTrace trace;
    double final_step = 0.0;
    double C_used = 0.0;
};

// One SGD update at an explicit draw: beta -= eta * Phi(lambda)' grad_h.
void sgd_step(const ParametricProblem& problem, const Basis& basis,
              std::span<const double> lambda, double eta, Coefficients& beta);

// Runs SGD from beta0.  C is the spectral constant sup sigma_max(Phi'Phi);
// pass a non-positive value to have it measured on the default search grid.
SgdResult run_sgd(const ParametricProblem& problem, const Basis& basis,
                  const LambdaDistribution& dist, const SgdConfig& cfg, const Coefficients& beta0,
                  double C = 0.0, const CheckpointHooks* hooks = nullptr);

struct GdResult {
    std::vector<double> theta;
    long iterations = 0;
    double grad_norm = 0.0;
    double value = 0.0;
};

// Fixed-step gradient descent on theta -> h(theta, lambda); stops early when
// the gradient norm reaches grad_tol (0 disables early stopping).
GdResult gd_solve(const ParametricProblem& problem, std::span<const double> lambda,
                  std::span<const double> theta0, long max_iters, double step,
                  double grad_tol = 0.0);

// Deterministic full-quadrature objective F_hat and its minimization; used to
// compute the average-optimal coefficients and optimal value for audits.
double fhat_value(const ParametricProblem& problem, const Basis& basis,
                  const QuadratureRule& rule, std::span<const double> beta_values);
std::vector<double> fhat_gradient(const ParametricProblem& problem, const Basis& basis,
                                  const QuadratureRule& rule, std::span<const double> beta_values);
Coefficients gd_minimize_fhat(const ParametricProblem& problem, const Basis& basis,
                              const QuadratureRule& rule, double grad_tol = 1e-10,
                              long max_iters = 500000);

}  // namespace solpath
