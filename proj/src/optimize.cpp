#include "solpath/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include "solpath/spectral.hpp"

namespace solpath {

namespace {

void check_wiring(const ParametricProblem& problem, const Basis& basis,
                  const LambdaDistribution& dist) {
    if (basis.d() != problem.dim_theta)
        throw std::invalid_argument("basis outputs d=" + std::to_string(basis.d()) +
                                    " but problem has dim_theta=" +
                                    std::to_string(problem.dim_theta));
    if (basis.lambda_dim() != problem.dim_lambda || basis.lambda_dim() != dist.dim())
        throw std::invalid_argument("lambda dimension mismatch between problem, basis, and distribution");
    for (int k = 0; k < dist.dim(); ++k) {
        const double slack = 1e-9 * std::max(1.0, basis.upper()[k] - basis.lower()[k]);
        if (dist.lower()[k] < basis.lower()[k] - slack || dist.upper()[k] > basis.upper()[k] + slack)
            throw std::invalid_argument("distribution support exceeds basis domain on axis " +
                                        std::to_string(k));
    }
}

// Strong convexity makes every objective at least quadratic in theta, so an
// iterate beyond ~1e150 overflows any h evaluation; treat it as diverged while
// the coefficients themselves are still representable.
bool evaluable(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x) || std::fabs(x) > 1e150) return false;
    return true;
}

}  // namespace

DistanceDiagnostic::DistanceDiagnostic(const DistanceDiagnosticConfig& cfg,
                                       std::span<const double> beta0, double eta0)
    : cfg_(cfg), anchor_(beta0.begin(), beta0.end()), eta_(eta0) {}

void DistanceDiagnostic::reset(std::span<const double> beta, double eta, long t_now) {
    anchor_.assign(beta.begin(), beta.end());
    eta_ = eta;
    prev_dist_ = -1.0;
    next_cp_real_ = static_cast<double>(t_now) + 1.0;
    next_cp_ = t_now + 1;
}

double DistanceDiagnostic::observe(long t, std::span<const double> beta) {
    if (!cfg_.enabled || t != next_cp_) return eta_;
    double d2 = 0.0;
    for (std::size_t i = 0; i < anchor_.size(); ++i) {
        const double r = beta[i] - anchor_[i];
        d2 += r * r;
    }
    const double dist = std::sqrt(d2);
    if (prev_dist_ >= 0.0 && dist < cfg_.q_diag * prev_dist_) {
        eta_ *= cfg_.reduction;
        anchor_.assign(beta.begin(), beta.end());
        prev_dist_ = -1.0;
    } else {
        prev_dist_ = dist;
    }
    next_cp_real_ = std::max(next_cp_real_ * cfg_.q_diag, static_cast<double>(next_cp_) + 1.0);
    next_cp_ = static_cast<long>(std::ceil(next_cp_real_));
    return eta_;
}

void sgd_step(const ParametricProblem& problem, const Basis& basis,
              std::span<const double> lambda, double eta, Coefficients& beta) {
    if (beta.basis_id != basis.id())
        throw std::invalid_argument("sgd_step: coefficients bound to a different basis");
    const int q = basis.q(), d = basis.d();
    std::vector<double> feats(q), theta(d), grad(d);
    basis.eval_features(lambda, std::span<double>(feats));
    basis.apply_features(feats, beta.values, theta);
    problem.value_grad(theta, lambda, std::span<double>(grad));
    for (int i = 0; i < d; ++i) {
        const double g = eta * grad[i];
        double* b = beta.values.data() + static_cast<std::size_t>(i) * q;
        for (int j = 0; j < q; ++j) b[j] -= g * feats[j];
    }
}

SgdResult run_sgd(const ParametricProblem& problem, const Basis& basis,
                  const LambdaDistribution& dist, const SgdConfig& cfg, const Coefficients& beta0,
                  double C, const CheckpointHooks* hooks) {
    check_wiring(problem, basis, dist);
    if (!(cfg.eta_bar > 0.0) || cfg.eta_bar > 1.0)
        throw std::invalid_argument("run_sgd: eta_bar must lie in (0, 1]");
    if (cfg.iterations < 0) throw std::invalid_argument("run_sgd: iterations must be >= 0");
    if (cfg.record_every < 1) throw std::invalid_argument("run_sgd: record_every must be >= 1");
    if (beta0.basis_id != basis.id())
        throw std::invalid_argument("run_sgd: coefficients bound to a different basis");

    if (C <= 0.0) C = compute_C(basis, default_C_grid(basis));
    const double eta0 = cfg.eta_bar / (C * problem.L);

    SgdResult res;
    res.C_used = C;
    res.beta = beta0;
    std::vector<double>& beta = res.beta.values;
    const int q = basis.q(), d = basis.d();
    std::vector<double> lambda(dist.dim()), feats(q), theta(d), grad(d);
    Rng rng(cfg.seed);
    DistanceDiagnostic diag(cfg.diagnostic, beta, eta0);
    double eta = eta0;

    auto record = [&](long t, long calls) {
        TraceRow row;
        row.iteration = t;
        row.gradient_calls = calls;
        row.step_size = eta;
        if (hooks && hooks->objective) {
            row.objective = hooks->objective(beta);
            row.has_objective = true;
        }
        if (hooks && hooks->path_error) {
            row.path_error = hooks->path_error(beta);
            row.has_path_error = true;
        }
        res.trace.rows.push_back(row);
    };

    record(0, 0);
    std::vector<double> last_good = beta;  // restored if the run diverges
    long calls = 0;
    for (long t = 1; t <= cfg.iterations; ++t) {
        dist.sample(rng, std::span<double>(lambda));
        basis.eval_features_unchecked(lambda.data(), feats.data());
        basis.apply_features(feats, beta, theta);
        problem.value_grad(theta, lambda, std::span<double>(grad));
        ++calls;
        for (int i = 0; i < d; ++i) {
            const double g = eta * grad[i];
            double* b = beta.data() + static_cast<std::size_t>(i) * q;
            for (int j = 0; j < q; ++j) b[j] -= g * feats[j];
        }
        eta = diag.observe(t, beta);
        if (t % cfg.record_every == 0 || t == cfg.iterations) {
            if (!evaluable(beta)) {
                res.trace.diverged = true;
                res.trace.divergence_note =
                    "non-finite or overflowing iterate at iteration " + std::to_string(t);
                beta = last_good;
                break;
            }
            record(t, calls);
            last_good = beta;
        }
    }
    res.trace.gradient_calls = calls;
    res.final_step = eta;
    return res;
}

GdResult gd_solve(const ParametricProblem& problem, std::span<const double> lambda,
                  std::span<const double> theta0, long max_iters, double step, double grad_tol) {
    if (static_cast<int>(theta0.size()) != problem.dim_theta)
        throw std::invalid_argument("gd_solve: theta0 has wrong dimension");
    if (!(step > 0.0)) throw std::invalid_argument("gd_solve: step must be positive");
    GdResult res;
    res.theta.assign(theta0.begin(), theta0.end());
    std::vector<double> grad(problem.dim_theta);
    res.value = problem.value_grad(res.theta, lambda, std::span<double>(grad));
    res.grad_norm = norm2(grad);
    for (long t = 0; t < max_iters; ++t) {
        if (grad_tol > 0.0 && res.grad_norm <= grad_tol) break;
        for (int i = 0; i < problem.dim_theta; ++i) res.theta[i] -= step * grad[i];
        res.value = problem.value_grad(res.theta, lambda, std::span<double>(grad));
        res.grad_norm = norm2(grad);
        ++res.iterations;
    }
    return res;
}

double fhat_value(const ParametricProblem& problem, const Basis& basis,
                  const QuadratureRule& rule, std::span<const double> beta_values) {
    std::vector<double> feats(basis.q()), theta(basis.d()), grad(basis.d());
    return expect(rule, [&](std::span<const double> lambda) {
        basis.eval_features_unchecked(lambda.data(), feats.data());
        basis.apply_features(feats, beta_values, theta);
        return problem.value_grad(theta, lambda, std::span<double>(grad));
    });
}

std::vector<double> fhat_gradient(const ParametricProblem& problem, const Basis& basis,
                                  const QuadratureRule& rule,
                                  std::span<const double> beta_values) {
    const int q = basis.q(), d = basis.d();
    std::vector<double> out(basis.p(), 0.0);
    std::vector<double> feats(q), theta(d), grad(d);
    for (std::size_t n = 0; n < rule.size(); ++n) {
        const double w = rule.weights[n];
        basis.eval_features_unchecked(rule.nodes[n].data(), feats.data());
        basis.apply_features(feats, beta_values, theta);
        problem.value_grad(theta, rule.nodes[n], std::span<double>(grad));
        for (int i = 0; i < d; ++i) {
            const double g = w * grad[i];
            double* o = out.data() + static_cast<std::size_t>(i) * q;
            for (int j = 0; j < q; ++j) o[j] += g * feats[j];
        }
    }
    return out;
}

Coefficients gd_minimize_fhat(const ParametricProblem& problem, const Basis& basis,
                              const QuadratureRule& rule, double grad_tol, long max_iters) {
    // Step from the spectral bound over the rule's own nodes: the quadrature
    // objective is (C_nodes * L)-smooth in beta.
    double c_nodes = 0.0;
    std::vector<double> feats(basis.q());
    for (const auto& node : rule.nodes) {
        basis.eval_features_unchecked(node.data(), feats.data());
        c_nodes = std::max(c_nodes, dot(feats, feats));
    }
    const double step = 1.0 / (c_nodes * problem.L);
    Coefficients beta = basis.zeros();
    for (long t = 0; t < max_iters; ++t) {
        const std::vector<double> g = fhat_gradient(problem, basis, rule, beta.values);
        if (norm2(g) <= grad_tol) break;
        for (std::size_t i = 0; i < beta.values.size(); ++i) beta.values[i] -= step * g[i];
    }
    return beta;
}

}  // namespace solpath
