#include "solpath/pathlearn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "solpath/spectral.hpp"

namespace solpath {

namespace {

// Strong convexity makes every objective at least quadratic in theta, so an
// iterate beyond ~1e150 overflows any h evaluation; treat it as diverged while
// the coefficients themselves are still representable.
bool evaluable(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x) || std::fabs(x) > 1e150) return false;
    return true;
}

}  // namespace

SgdResult run_lsp(const ParametricProblem& problem, const Basis& basis,
                  const LambdaDistribution& dist, const SgdConfig& cfg, const LspOptions& opts) {
    if (!(opts.C_scale > 0.0)) throw std::invalid_argument("run_lsp: C_scale must be positive");
    CheckpointHooks hooks;
    if (opts.fhat_rule) {
        const QuadratureRule* rule = opts.fhat_rule;
        hooks.objective = [&problem, &basis, rule](std::span<const double> b) {
            return fhat_value(problem, basis, *rule, b);
        };
    }
    if (opts.path_error) {
        const PathErrorFn& pe = opts.path_error;
        hooks.path_error = [&basis, &pe](std::span<const double> b) { return pe(basis, b); };
    }
    double C = 0.0;  // non-positive -> run_sgd measures it
    if (opts.C_scale != 1.0) C = opts.C_scale * compute_C(basis, default_C_grid(basis));
    return run_sgd(problem, basis, dist, cfg, basis.zeros(), C,
                   (hooks.objective || hooks.path_error) ? &hooks : nullptr);
}

Coefficients warm_start_pad(const Basis& from, const Basis& to, const Coefficients& beta) {
    if (beta.basis_id != from.id())
        throw std::invalid_argument("warm_start_pad: coefficients bound to a different basis");
    // Walk the extension chain from -> to, composing the feature index maps.
    Basis cur = from;
    std::vector<int> map(static_cast<std::size_t>(from.q()));
    for (int j = 0; j < from.q(); ++j) map[static_cast<std::size_t>(j)] = j;
    int guard = 0;
    while (cur.id() != to.id()) {
        if (cur.q() >= to.q() || ++guard > 256)
            throw std::invalid_argument("warm_start_pad: target basis is not an extension of the source");
        const std::vector<int> step = cur.extension_index_map();
        for (int& m : map) m = step[static_cast<std::size_t>(m)];
        cur = cur.extend();
    }
    Coefficients out = to.zeros();
    const int qf = from.q(), qt = to.q();
    for (int i = 0; i < from.d(); ++i)
        for (int j = 0; j < qf; ++j)
            out.values[static_cast<std::size_t>(i) * qt +
                       static_cast<std::size_t>(map[static_cast<std::size_t>(j)])] =
                beta.values[static_cast<std::size_t>(i) * qf + static_cast<std::size_t>(j)];
    return out;
}

AlspResult run_alsp(const ParametricProblem& problem, const Basis& initial,
                    const LambdaDistribution& dist, const AlspConfig& cfg,
                    const QuadratureRule& fhat_rule, const PathErrorFn& path_error) {
    if (initial.d() != problem.dim_theta || initial.lambda_dim() != problem.dim_lambda ||
        initial.lambda_dim() != dist.dim())
        throw std::invalid_argument("run_alsp: problem/basis/distribution dimension mismatch");
    if (cfg.max_q < initial.q())
        throw std::invalid_argument("run_alsp: max_q below the initial basis size");
    if (!(cfg.stall_tol > 0.0)) throw std::invalid_argument("run_alsp: stall_tol must be positive");
    if (cfg.stall_window < 1) throw std::invalid_argument("run_alsp: stall_window must be >= 1");
    if (cfg.eval_cadence < 1) throw std::invalid_argument("run_alsp: eval_cadence must be >= 1");
    if (!(cfg.sgd.eta_bar > 0.0) || cfg.sgd.eta_bar > 1.0)
        throw std::invalid_argument("run_alsp: eta_bar must lie in (0, 1]");
    if (!(cfg.C_scale > 0.0)) throw std::invalid_argument("run_alsp: C_scale must be positive");

    AlspResult res{.stages = {}, .trace = {}, .basis = initial, .beta = initial.zeros(),
                   .stop_reason = ""};
    Basis& basis = res.basis;
    Coefficients& beta = res.beta;
    const double L = problem.L;
    double C = cfg.C_scale * compute_C(basis, default_C_grid(basis));
    double eta = cfg.sgd.eta_bar / (C * L);
    Rng rng(cfg.sgd.seed);
    DistanceDiagnostic diag(cfg.sgd.diagnostic, beta.values, eta);

    const long total = cfg.sgd.iterations;
    long t = 0;
    int stage = 0;
    long stage_start = 0;
    std::vector<double> fhist;

    std::vector<double> lambda(dist.dim());
    std::vector<double> feats, theta(basis.d()), grad(basis.d());
    feats.resize(static_cast<std::size_t>(basis.q()));

    auto record = [&](double f, double pe, bool has_pe) {
        TraceRow row;
        row.iteration = t;
        row.gradient_calls = t;
        row.step_size = eta;
        row.objective = f;
        row.has_objective = true;
        row.path_error = pe;
        row.has_path_error = has_pe;
        row.stage = stage;
        res.trace.rows.push_back(row);
    };
    auto finalize_stage = [&](double f, double pe, bool has_pe) {
        StageResult sr;
        sr.stage = stage;
        sr.q = basis.q();
        sr.beta = beta;
        sr.start_iteration = stage_start;
        sr.end_iteration = t;
        sr.gradient_calls = t;
        sr.fhat_end = f;
        sr.path_error_end = pe;
        sr.has_path_error = has_pe;
        res.stages.push_back(sr);
    };

    double f = fhat_value(problem, basis, fhat_rule, beta.values);
    double pe = path_error ? path_error(basis, beta.values) : 0.0;
    record(f, pe, static_cast<bool>(path_error));
    fhist.push_back(f);

    if (total == 0) {
        finalize_stage(f, pe, static_cast<bool>(path_error));
        res.stop_reason = "budget";
        res.trace.gradient_calls = 0;
        return res;
    }

    const int q0 = basis.q(), d = basis.d();
    int q = q0;
    while (true) {
        const long chunk_end = std::min(t + cfg.eval_cadence, total);
        for (; t < chunk_end;) {
            dist.sample(rng, std::span<double>(lambda));
            basis.eval_features_unchecked(lambda.data(), feats.data());
            basis.apply_features(feats, beta.values, theta);
            problem.value_grad(theta, lambda, std::span<double>(grad));
            for (int i = 0; i < d; ++i) {
                const double g = eta * grad[i];
                double* b = beta.values.data() + static_cast<std::size_t>(i) * q;
                for (int j = 0; j < q; ++j) b[j] -= g * feats[j];
            }
            ++t;
            eta = diag.observe(t, beta.values);
        }
        if (!evaluable(beta.values)) {
            res.trace.diverged = true;
            res.trace.divergence_note = "non-finite or overflowing iterate at iteration " +
                                        std::to_string(t) + " (stage " + std::to_string(stage) +
                                        ")";
            finalize_stage(fhist.back(), 0.0, false);
            res.stop_reason = "diverged";
            break;
        }
        f = fhat_value(problem, basis, fhat_rule, beta.values);
        pe = path_error ? path_error(basis, beta.values) : 0.0;
        record(f, pe, static_cast<bool>(path_error));
        fhist.push_back(f);

        // Stall rule: best F_hat over the trailing stall_window checkpoints vs
        // the best seen before them, as a relative improvement.
        const std::size_t k = fhist.size() - 1;
        bool stalled = false;
        if (k >= 1) {
            const std::size_t k_ref =
                k > static_cast<std::size_t>(cfg.stall_window) ? k - cfg.stall_window : 0;
            double best_before = fhist[0];
            for (std::size_t i = 1; i <= k_ref; ++i) best_before = std::min(best_before, fhist[i]);
            double best_recent = fhist[k_ref + 1];
            for (std::size_t i = k_ref + 2; i <= k; ++i)
                best_recent = std::min(best_recent, fhist[i]);
            const double denom = std::max(std::fabs(best_before), 1e-12);
            stalled = (best_before - best_recent) / denom < cfg.stall_tol;
        }

        if (stalled) {
            finalize_stage(f, pe, static_cast<bool>(path_error));
            if (q >= cfg.max_q) {
                res.stop_reason = "stalled_at_max_q";
                break;
            }
            if (t >= total) {
                res.stop_reason = "budget";
                break;
            }
            const Basis next = basis.extend();
            beta = warm_start_pad(basis, next, beta);
            basis = next;
            q = basis.q();
            feats.resize(static_cast<std::size_t>(q));
            C = cfg.C_scale * compute_C(basis, default_C_grid(basis));
            eta = cfg.sgd.eta_bar / (C * L);
            diag.reset(beta.values, eta, t);
            ++stage;
            stage_start = t;
            fhist.clear();
            fhist.push_back(fhat_value(problem, basis, fhat_rule, beta.values));
            continue;
        }
        if (t >= total) {
            finalize_stage(f, pe, static_cast<bool>(path_error));
            res.stop_reason = "budget";
            break;
        }
    }
    res.trace.gradient_calls = t;
    return res;
}

std::function<std::vector<double>(std::span<const double>)> learned_path(const Basis& basis,
                                                                         Coefficients beta) {
    if (beta.basis_id != basis.id())
        throw std::invalid_argument("learned_path: coefficients bound to a different basis");
    return [basis, beta = std::move(beta)](std::span<const double> lambda) {
        return basis.apply(beta, lambda);
    };
}

}  // namespace solpath
