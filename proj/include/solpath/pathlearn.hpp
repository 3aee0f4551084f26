#pragma once

#include <functional>
#include <string>
#include <vector>

#include "solpath/basis.hpp"
#include "solpath/distribution.hpp"
#include "solpath/optimize.hpp"
#include "solpath/problems.hpp"

// Top-level path-learning drivers.  run_lsp fits a fixed basis with one SGD
// run; run_alsp grows the basis whenever the quadrature objective stalls,
// warm-starting each stage from the padded previous coefficients.

namespace solpath {

// Basis-aware sup-gap measurement (the basis changes across ALSP stages).
using PathErrorFn = std::function<double(const Basis&, std::span<const double> beta_values)>;

struct LspOptions {
    const QuadratureRule* fhat_rule = nullptr;  // record F_hat at checkpoints when set
    PathErrorFn path_error;                     // record sup-gap at checkpoints when set
    double C_scale = 1.0;                       // multiplies the measured C; < 1 voids the
                                                // step-size guarantee (negative-control runs)
};

// SGD from beta = 0 on the fixed basis; trace rows carry F_hat / path error
// when the corresponding option is supplied.
SgdResult run_lsp(const ParametricProblem& problem, const Basis& basis,
                  const LambdaDistribution& dist, const SgdConfig& cfg,
                  const LspOptions& opts = {});

// Copies coefficients of `from` into the matching (block, feature) slots of
// `to`, zeros elsewhere.  `to` must be reachable from `from` by extend().
Coefficients warm_start_pad(const Basis& from, const Basis& to, const Coefficients& beta);

struct AlspConfig {
    int max_q = 12;            // extension stops once q reaches this
    int stall_window = 3;      // checkpoints compared by the stall rule
    double stall_tol = 1e-3;   // relative F_hat improvement threshold
    long eval_cadence = 200;   // iterations between F_hat checkpoints
    SgdConfig sgd;             // iterations = total budget across stages
    double C_scale = 1.0;      // multiplies the measured C at every stage; < 1
                               // voids the step-size guarantee (negative controls)
};

struct StageResult {
    int stage = 0;
    int q = 0;
    Coefficients beta;           // coefficients at stage end
    long start_iteration = 0;    // global iteration of the stage's first step
    long end_iteration = 0;      // global iteration at stage end (boundary)
    long gradient_calls = 0;     // cumulative at stage end
    double fhat_end = 0.0;
    double path_error_end = 0.0;
    bool has_path_error = false;
};

struct AlspResult {
    std::vector<StageResult> stages;
    RunTrace trace;
    Basis basis;         // basis of the final stage
    Coefficients beta;   // final coefficients
    std::string stop_reason;  // "budget", "stalled_at_max_q", "diverged"
};

// Algorithm: run SGD on the current basis; every eval_cadence iterations
// evaluate F_hat on fhat_rule; when the best F_hat over the last stall_window
// checkpoints improves on the best before them by less than stall_tol
// (relative), extend the basis, pad the coefficients, recompute C_q, and
// reset the step to eta_bar / (C_q L).  Stops on budget exhaustion or on a
// stall at max_q.  Trace rows are recorded at every checkpoint.
AlspResult run_alsp(const ParametricProblem& problem, const Basis& initial,
                    const LambdaDistribution& dist, const AlspConfig& cfg,
                    const QuadratureRule& fhat_rule, const PathErrorFn& path_error = {});

// lambda -> Phi(lambda) beta as a plain callable.
std::function<std::vector<double>(std::span<const double>)> learned_path(const Basis& basis,
                                                                         Coefficients beta);

}  // namespace solpath
