#include "solpath/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "solpath/baseline.hpp"
#include "solpath/csvio.hpp"
#include "solpath/evaluate.hpp"
#include "solpath/pathlearn.hpp"
#include "solpath/spectral.hpp"

namespace solpath {

namespace {

using nlohmann::json;

struct ProblemBundle {
    ParametricProblem problem;
    std::optional<MarketModel> market;
};

ProblemBundle build_problem(const Config& cfg) {
    const std::string name = cfg.str("problem.name");
    ProblemBundle bundle;
    if (name == "quadratic_toy") {
        bundle.problem = quadratic_toy_path(cfg.str("problem.path", "identity"));
    } else if (name == "weighted_logistic") {
        ClassificationData data;
        if (cfg.has("problem.data")) {
            data = ingest_classification_csv(cfg.str("problem.data"),
                                             cfg.boolean("problem.standardize", false),
                                             cfg.boolean("problem.intercept", false));
        } else {
            data = synth_classification(
                static_cast<std::uint64_t>(cfg.integer("problem.synth_seed", 7)),
                static_cast<int>(cfg.integer("problem.n", 400)),
                static_cast<int>(cfg.integer("problem.d", 6)),
                cfg.number("problem.imbalance", 0.044),
                cfg.boolean("problem.standardize", false),
                cfg.boolean("problem.intercept", false));
        }
        bundle.problem = weighted_logistic(data, cfg.number("problem.ridge", 0.125));
    } else if (name == "portfolio_2d" || name == "portfolio_12d") {
        MarketModel market;
        if (cfg.has("problem.returns")) {
            market = ingest_returns_csv(cfg.str("problem.returns"));
        } else {
            market = synth_market(static_cast<std::uint64_t>(cfg.integer("problem.synth_seed", 7)),
                                  static_cast<int>(cfg.integer("problem.assets", 10)),
                                  cfg.number("problem.eig_lo", 0.5),
                                  cfg.number("problem.eig_hi", 1.5),
                                  cfg.number("problem.mean_scale", 0.1));
        }
        const double lam2_lo = cfg.number("problem.lam2_lo", 0.2);
        const double lam2_hi = cfg.number("problem.lam2_hi", 1.0);
        bundle.problem = name == "portfolio_2d" ? portfolio_2d(market, lam2_lo, lam2_hi)
                                                : portfolio_12d(market, lam2_lo, lam2_hi);
        bundle.market = std::move(market);
    } else {
        throw std::runtime_error(
            "problem.name '" + name +
            "' unknown (expected quadratic_toy, weighted_logistic, portfolio_2d, portfolio_12d)");
    }
    return bundle;
}

Basis build_basis(const Config& cfg, int d) {
    const std::string kind = cfg.str("basis.kind");
    const int q = static_cast<int>(cfg.integer("basis.q"));
    if (kind == "legendre") return Basis::legendre(q, d);
    if (kind == "shifted_legendre")
        return Basis::shifted_legendre(q, d, cfg.number("basis.lo", 0.0),
                                       cfg.number("basis.hi", 1.0));
    if (kind == "shifted_jacobi")
        return Basis::shifted_jacobi(q, d, cfg.number("basis.jacobi_a"),
                                     cfg.number("basis.jacobi_b"), cfg.number("basis.lo", 0.0),
                                     cfg.number("basis.hi", 1.0));
    if (kind == "tensor_legendre_2d")
        return Basis::tensor_legendre_2d(q, d, cfg.numbers("basis.box_lo"),
                                         cfg.numbers("basis.box_hi"));
    if (kind == "monomial")
        return Basis::monomial(q, d, cfg.number("basis.lo", -1.0), cfg.number("basis.hi", 1.0));
    if (kind == "portfolio_custom_12d")
        return Basis::portfolio_custom_12d(q, d, cfg.numbers("basis.box_lo", {}),
                                           cfg.numbers("basis.box_hi", {}));
    throw std::runtime_error("basis.kind '" + kind + "' unknown");
}

LambdaDistribution build_distribution(const Config& cfg) {
    const std::string kind = cfg.str("distribution.kind");
    if (kind == "uniform_box")
        return LambdaDistribution::uniform_box(cfg.numbers("distribution.lo"),
                                               cfg.numbers("distribution.hi"));
    if (kind == "beta")
        return LambdaDistribution::beta(cfg.number("distribution.alpha"),
                                        cfg.number("distribution.beta"));
    if (kind == "tensor_uniform_2d")
        return LambdaDistribution::tensor_uniform_2d(cfg.numbers("distribution.lo"),
                                                     cfg.numbers("distribution.hi"));
    throw std::runtime_error("distribution.kind '" + kind + "' unknown");
}

SgdConfig build_sgd_config(const Config& cfg) {
    SgdConfig sgd;
    sgd.eta_bar = cfg.number("method.eta_bar", 1.0);
    if (!(sgd.eta_bar > 0.0) || sgd.eta_bar > 1.0)
        throw std::runtime_error("method.eta_bar must lie in (0, 1], got " +
                                 format_double(sgd.eta_bar));
    sgd.iterations = cfg.integer("method.iterations", 10000);
    sgd.seed = static_cast<std::uint64_t>(cfg.integer("method.seed", 0));
    sgd.record_every = cfg.integer("method.record_every", 100);
    sgd.diagnostic.enabled = cfg.boolean("method.diagnostic", false);
    sgd.diagnostic.q_diag = cfg.number("method.q_diag", 1.3);
    sgd.diagnostic.reduction = cfg.number("method.reduction", 0.5);
    return sgd;
}

QuadratureRule make_fhat_rule(const Config& cfg, const LambdaDistribution& dist) {
    if (dist.dim() <= 2)
        return dist.quadrature(static_cast<int>(cfg.integer("method.fhat_order", 32)));
    return sample_rule(dist, static_cast<int>(cfg.integer("method.fhat_samples", 1000)),
                       static_cast<std::uint64_t>(cfg.integer("method.fhat_seed", 777)));
}

bool ground_truth_configured(const Config& cfg) {
    return cfg.has("groundtruth.file") || cfg.has("groundtruth.points") ||
           cfg.has("groundtruth.samples");
}

std::vector<int> ground_truth_points(const Config& cfg, int dim) {
    std::vector<int> pts;
    if (cfg.has("groundtruth.points")) {
        for (double v : cfg.numbers("groundtruth.points")) pts.push_back(static_cast<int>(v));
    } else {
        pts.assign(static_cast<std::size_t>(dim), dim == 1 ? 1024 : 100);
    }
    if (static_cast<int>(pts.size()) != dim)
        throw std::runtime_error("groundtruth.points must list one count per lambda axis");
    return pts;
}

GroundTruthGrid build_ground_truth(const Config& cfg, const ProblemBundle& bundle,
                                   const LambdaDistribution& dist) {
    GroundTruthSpec spec;
    spec.iterations = cfg.integer("groundtruth.iterations", 5000);
    spec.grad_tol = cfg.number("groundtruth.grad_tol", 1e-12);
    spec.residual_tol = cfg.number("groundtruth.residual_tol", 1e-7);
    if (dist.dim() > 2) {
        const int n = static_cast<int>(cfg.integer("groundtruth.samples", 1000));
        const QuadratureRule pts = sample_rule(
            dist, n, static_cast<std::uint64_t>(cfg.integer("groundtruth.seed", 12345)));
        const bool analytic = cfg.boolean("groundtruth.analytic", bundle.market.has_value());
        if (analytic) {
            if (!bundle.market)
                throw std::runtime_error(
                    "groundtruth.analytic requires a portfolio problem with a market model");
            return analytic_ground_truth_12d(bundle.problem, *bundle.market, pts.nodes);
        }
        return compute_ground_truth(bundle.problem, pts.nodes, spec);
    }
    const std::vector<int> pts = ground_truth_points(cfg, dist.dim());
    return compute_ground_truth(bundle.problem,
                                uniform_grid_nodes(dist.lower(), dist.upper(), pts), spec);
}

std::optional<GroundTruthGrid> ensure_ground_truth(const Config& cfg, const ProblemBundle& bundle,
                                                   const LambdaDistribution& dist,
                                                   const std::string& out_dir) {
    if (!ground_truth_configured(cfg)) return std::nullopt;
    std::optional<std::string> cache;
    if (cfg.has("groundtruth.file")) {
        std::filesystem::path p = cfg.str("groundtruth.file");
        if (p.is_relative()) p = std::filesystem::path(out_dir) / p;
        cache = p.string();
        if (std::filesystem::exists(p)) {
            GroundTruthGrid grid = ground_truth_from_csv(*cache);
            if (grid.problem_name != bundle.problem.name)
                throw std::runtime_error("groundtruth.file '" + *cache + "' was computed for '" +
                                         grid.problem_name + "', not '" + bundle.problem.name +
                                         "'");
            return grid;
        }
    }
    GroundTruthGrid grid = build_ground_truth(cfg, bundle, dist);
    if (cache) ground_truth_to_csv(grid, *cache);
    return grid;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    const bool has_obj = !trace.rows.empty() && trace.rows.front().has_objective;
    const bool has_pe = !trace.rows.empty() && trace.rows.front().has_path_error;
    CsvWriter out(path);
    std::vector<std::string> names = {"iteration", "gradient_calls", "step_size", "stage"};
    if (has_obj) names.push_back("objective");
    if (has_pe) names.push_back("path_error");
    out.header(names);
    std::vector<double> row;
    for (const TraceRow& r : trace.rows) {
        row = {static_cast<double>(r.iteration), static_cast<double>(r.gradient_calls),
               r.step_size, static_cast<double>(r.stage)};
        if (has_obj) row.push_back(r.objective);
        if (has_pe) row.push_back(r.path_error);
        out.row(row);
    }
    out.close();
}

void write_coefficients_csv(const Basis& basis, const Coefficients& beta,
                            const std::string& path) {
    CsvWriter out(path);
    out.comment("basis=" + basis.id());
    const std::vector<std::string> names = {"block", "feature", "value"};
    out.header(names);
    const int q = basis.q();
    for (int i = 0; i < basis.d(); ++i)
        for (int j = 0; j < q; ++j) {
            const double row[] = {static_cast<double>(i), static_cast<double>(j),
                                  beta.values[static_cast<std::size_t>(i) * q +
                                              static_cast<std::size_t>(j)]};
            out.row(row);
        }
    out.close();
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

void write_meta(const std::string& out_dir, double wall_seconds) {
    const auto now = std::chrono::system_clock::now();
    json meta;
    meta["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    meta["wall_seconds"] = wall_seconds;
    write_json(meta, out_dir + "/meta.json");
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

PathErrorFn make_path_error_fn(const ParametricProblem& problem, const GroundTruthGrid& truth) {
    return [&problem, &truth](const Basis& basis, std::span<const double> values) {
        return path_error_sup(problem, basis, values, truth);
    };
}

// Shared by cmd_run and cmd_compare: everything a learning run produces.
struct LearnOutcome {
    Basis basis;
    Coefficients beta;
    RunTrace trace;
    double C_used = 0.0;
    double final_step = 0.0;
    std::vector<StageResult> stages;  // ALSP only
    std::string stop_reason;          // ALSP only
};

LearnOutcome do_learn_run(const Config& cfg, const ProblemBundle& bundle,
                          const LambdaDistribution& dist,
                          const std::optional<GroundTruthGrid>& truth) {
    const std::string method = cfg.str("method.name");
    Basis basis = build_basis(cfg, bundle.problem.dim_theta);
    const SgdConfig sgd = build_sgd_config(cfg);
    const QuadratureRule rule = make_fhat_rule(cfg, dist);
    PathErrorFn pe;
    if (truth) pe = make_path_error_fn(bundle.problem, *truth);

    const double c_scale = cfg.number("method.C_scale", 1.0);
    if (method == "lsp") {
        LspOptions opts;
        opts.fhat_rule = &rule;
        opts.path_error = pe;
        opts.C_scale = c_scale;
        SgdResult res = run_lsp(bundle.problem, basis, dist, sgd, opts);
        return LearnOutcome{std::move(basis), std::move(res.beta), std::move(res.trace),
                            res.C_used, res.final_step, {}, ""};
    }
    if (method == "alsp") {
        AlspConfig acfg;
        acfg.max_q = static_cast<int>(cfg.integer("method.max_q", 12));
        acfg.stall_window = static_cast<int>(cfg.integer("method.stall_window", 3));
        acfg.stall_tol = cfg.number("method.stall_tol", 1e-3);
        acfg.eval_cadence = cfg.integer("method.eval_cadence", 200);
        acfg.sgd = sgd;
        acfg.C_scale = c_scale;
        AlspResult res = run_alsp(bundle.problem, basis, dist, acfg, rule, pe);
        LearnOutcome out{std::move(res.basis), std::move(res.beta), std::move(res.trace),
                         0.0, 0.0, std::move(res.stages), res.stop_reason};
        if (!out.trace.rows.empty()) out.final_step = out.trace.rows.back().step_size;
        return out;
    }
    throw std::runtime_error("method.name '" + method + "' unknown (expected lsp, alsp, discretization)");
}

int run_discretization_cmd(const Config& cfg, const ProblemBundle& bundle,
                           const LambdaDistribution& dist, const std::string& out_dir,
                           const Timer& timer) {
    const DiscretizationSchedule schedule =
        make_schedule(cfg.number("method.delta"), cfg.number("method.c1", 1.0),
                      cfg.number("method.c2", 0.5));
    BaselineRun run = run_discretization(bundle.problem, dist.lower(), dist.upper(), schedule);
    write_trace_csv(run.trace, out_dir + "/trace.csv");

    // Grid solutions in ground-truth table layout (node order is lexicographic).
    {
        CsvWriter out(out_dir + "/path.csv");
        out.comment("problem=" + bundle.problem.name);
        std::vector<std::string> names;
        for (int k = 0; k < dist.dim(); ++k) names.push_back("lambda_" + std::to_string(k));
        for (int i = 0; i < bundle.problem.dim_theta; ++i)
            names.push_back("theta_" + std::to_string(i));
        out.header(names);
        std::vector<double> row(names.size());
        for (std::size_t i = 0; i < run.path.size(); ++i) {
            std::size_t c = 0;
            for (double v : run.path.node(i)) row[c++] = v;
            for (double v : run.path.solution(i)) row[c++] = v;
            out.row(row);
        }
        out.close();
    }

    json summary;
    summary["method"] = "discretization";
    summary["problem"] = bundle.problem.name;
    summary["delta"] = schedule.delta;
    summary["points_per_axis"] = schedule.points_per_axis;
    summary["steps_per_point"] = schedule.steps_per_point;
    summary["gradient_calls"] = run.trace.gradient_calls;
    summary["scheduled_calls"] = schedule.total_gradient_calls(dist.dim());

    GroundTruthSpec spec;
    spec.iterations = cfg.integer("groundtruth.iterations", 5000);
    spec.grad_tol = cfg.number("groundtruth.grad_tol", 1e-12);
    std::vector<std::vector<double>> grid_nodes;
    grid_nodes.reserve(run.path.size());
    for (std::size_t i = 0; i < run.path.size(); ++i) grid_nodes.push_back(run.path.node(i));
    const GroundTruthGrid node_truth = compute_ground_truth(bundle.problem, grid_nodes, spec);
    summary["grid_pass_error"] = grid_pass_error(run.path, bundle.problem, node_truth.theta);

    const std::optional<GroundTruthGrid> truth = ensure_ground_truth(cfg, bundle, dist, out_dir);
    if (truth) {
        const PathErrorReport rep = path_error(
            bundle.problem,
            [&](std::span<const double> lambda) { return run.path.lookup(lambda); }, *truth);
        summary["eps_sp"] = rep.eps_sp;
    }
    summary["wall_seconds"] = timer.seconds();
    write_json(summary, out_dir + "/summary.json");
    write_meta(out_dir, timer.seconds());
    return kExitOk;
}

}  // namespace

std::string resolve_output_dir(const Config& cfg) {
    std::filesystem::path base = cfg.str("output.dir", "out");
    if (base.is_relative()) {
        if (const char* root = std::getenv("SOLPATH_OUT")) base = std::filesystem::path(root) / base;
    }
    std::filesystem::create_directories(base);
    return base.string();
}

int cmd_run(const Config& cfg) {
    try {
        const Timer timer;
        const ProblemBundle bundle = build_problem(cfg);
        const LambdaDistribution dist = build_distribution(cfg);
        const std::string out_dir = resolve_output_dir(cfg);
        if (cfg.str("method.name") == "discretization")
            return run_discretization_cmd(cfg, bundle, dist, out_dir, timer);

        const std::optional<GroundTruthGrid> truth =
            ensure_ground_truth(cfg, bundle, dist, out_dir);
        const LearnOutcome out = do_learn_run(cfg, bundle, dist, truth);

        write_trace_csv(out.trace, out_dir + "/trace.csv");
        write_coefficients_csv(out.basis, out.beta, out_dir + "/coefficients.csv");
        if (!out.stages.empty()) {
            CsvWriter st(out_dir + "/stages.csv");
            const std::vector<std::string> names = {
                "stage", "q", "start_iteration", "end_iteration", "gradient_calls", "fhat_end",
                "path_error_end"};
            st.header(names);
            for (const StageResult& s : out.stages) {
                const double row[] = {static_cast<double>(s.stage),
                                      static_cast<double>(s.q),
                                      static_cast<double>(s.start_iteration),
                                      static_cast<double>(s.end_iteration),
                                      static_cast<double>(s.gradient_calls),
                                      s.fhat_end,
                                      s.has_path_error ? s.path_error_end : -1.0};
                st.row(row);
            }
            st.close();
        }

        json summary;
        summary["method"] = cfg.str("method.name");
        summary["problem"] = bundle.problem.name;
        summary["basis"] = out.basis.id();
        summary["q_final"] = out.basis.q();
        summary["gradient_calls"] = out.trace.gradient_calls;
        summary["diverged"] = out.trace.diverged;
        if (!out.trace.divergence_note.empty()) summary["divergence_note"] = out.trace.divergence_note;
        if (out.C_used > 0.0) summary["C_used"] = out.C_used;
        summary["final_step"] = out.final_step;
        if (!out.stop_reason.empty()) summary["stop_reason"] = out.stop_reason;
        if (!out.stages.empty()) summary["stages"] = out.stages.size();
        for (auto it = out.trace.rows.rbegin(); it != out.trace.rows.rend(); ++it) {
            if (it->has_objective) {
                summary["objective_final"] = it->objective;
                break;
            }
        }
        for (auto it = out.trace.rows.rbegin(); it != out.trace.rows.rend(); ++it) {
            if (it->has_path_error) {
                summary["eps_sp_final"] = it->path_error;
                break;
            }
        }
        summary["wall_seconds"] = timer.seconds();
        write_json(summary, out_dir + "/summary.json");
        write_meta(out_dir, timer.seconds());
        if (out.trace.diverged) {
            std::fprintf(stderr, "error: %s\n", out.trace.divergence_note.c_str());
            return kExitDiverged;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}

int cmd_groundtruth(const Config& cfg) {
    try {
        const Timer timer;
        const ProblemBundle bundle = build_problem(cfg);
        const LambdaDistribution dist = build_distribution(cfg);
        const std::string out_dir = resolve_output_dir(cfg);
        GroundTruthGrid grid = build_ground_truth(cfg, bundle, dist);
        std::filesystem::path p = cfg.str("groundtruth.file", "groundtruth.csv");
        if (p.is_relative()) p = std::filesystem::path(out_dir) / p;
        ground_truth_to_csv(grid, p.string());
        json summary;
        summary["problem"] = bundle.problem.name;
        summary["nodes"] = grid.size();
        summary["max_residual"] = grid.max_residual();
        summary["file"] = p.string();
        summary["wall_seconds"] = timer.seconds();
        write_json(summary, out_dir + "/groundtruth_summary.json");
        write_meta(out_dir, timer.seconds());
        std::printf("groundtruth: %zu nodes, max residual %s -> %s\n", grid.size(),
                    format_double(grid.max_residual()).c_str(), p.string().c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}

int cmd_audit(const Config& cfg) {
    try {
        const Timer timer;
        const ProblemBundle bundle = build_problem(cfg);
        const LambdaDistribution dist = build_distribution(cfg);
        const std::string out_dir = resolve_output_dir(cfg);
        Basis basis = build_basis(cfg, bundle.problem.dim_theta);

        QuadratureRule rule;
        if (dist.dim() <= 2) {
            const long def = std::max<long>(basis.q(), 16);
            rule = dist.quadrature(static_cast<int>(cfg.integer("audit.quad_order", def)));
        } else {
            rule = sample_rule(dist, static_cast<int>(cfg.integer("audit.samples_rule", 1000)),
                               static_cast<std::uint64_t>(cfg.integer("audit.rule_seed", 777)));
        }

        const Coefficients center = gd_minimize_fhat(bundle.problem, basis, rule, 1e-10);
        const std::vector<Coefficients> betas =
            sample_betas(basis, center, static_cast<int>(cfg.integer("audit.samples", 100)),
                         cfg.number("audit.radius", 0.5),
                         static_cast<std::uint64_t>(cfg.integer("audit.seed", 1)));
        const double eps_star_ub = cfg.number("audit.eps_star_ub", 0.0);

        std::optional<SpectralConstants> override_constants;
        const double scale_C = cfg.number("audit.scale_C", 1.0);
        if (scale_C != 1.0) {
            SpectralConstants k;
            k.C = scale_C * compute_C(basis, default_C_grid(basis));
            override_constants = k;
        }
        const SpectralConstants* kp = override_constants ? &*override_constants : nullptr;

        const std::string kind = cfg.str("audit.kind", "rwgc");
        json summary;
        summary["problem"] = bundle.problem.name;
        summary["samples"] = betas.size();
        bool all_pass = true;
        if (kind == "rwgc" || kind == "both") {
            const AuditReport rep = rwgc_audit(bundle.problem, basis, rule, betas, eps_star_ub, kp);
            audit_to_csv(rep, out_dir + "/audit_rwgc.csv");
            summary["rwgc_pass"] = rep.pass;
            summary["rwgc_min_slack"] = rep.min_slack;
            all_pass = all_pass && rep.pass;
            std::printf("rwgc audit: %s (min slack %s)\n", rep.pass ? "pass" : "FAIL",
                        format_double(rep.min_slack).c_str());
        }
        if (kind == "decomposition" || kind == "both") {
            const std::optional<GroundTruthGrid> truth =
                ensure_ground_truth(cfg, bundle, dist, out_dir);
            if (!truth)
                throw std::runtime_error(
                    "audit.kind=decomposition needs ground truth (set groundtruth.points or "
                    "groundtruth.file)");
            const AuditReport rep = decomposition_audit(bundle.problem, basis, rule, *truth,
                                                        betas, eps_star_ub, kp);
            audit_to_csv(rep, out_dir + "/audit_decomposition.csv");
            summary["decomposition_pass"] = rep.pass;
            summary["decomposition_min_slack"] = rep.min_slack;
            all_pass = all_pass && rep.pass;
            std::printf("decomposition audit: %s (min slack %s)\n", rep.pass ? "pass" : "FAIL",
                        format_double(rep.min_slack).c_str());
        }
        if (kind != "rwgc" && kind != "decomposition" && kind != "both")
            throw std::runtime_error("audit.kind '" + kind +
                                     "' unknown (expected rwgc, decomposition, both)");
        summary["all_pass"] = all_pass;
        summary["wall_seconds"] = timer.seconds();
        write_json(summary, out_dir + "/audit_summary.json");
        write_meta(out_dir, timer.seconds());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}

int cmd_spectra(const Config& cfg) {
    try {
        const Timer timer;
        int d = 1;
        if (cfg.has("problem.name")) d = build_problem(cfg).problem.dim_theta;
        d = static_cast<int>(cfg.integer("spectra.d", d));
        const Basis basis = build_basis(cfg, d);
        const LambdaDistribution dist = build_distribution(cfg);
        const std::string out_dir = resolve_output_dir(cfg);
        int needed = basis.q();
        if (basis.kind() == BasisKind::tensor_legendre_2d)
            needed = static_cast<int>(std::lround(std::sqrt(static_cast<double>(basis.q()))));
        if (dist.dim() > 2) needed = 2000;  // Monte Carlo sample count instead
        const int order = static_cast<int>(cfg.integer("spectra.quad_order", needed));
        const SpectralReport rep = spectral_report(
            basis, dist, order, static_cast<int>(cfg.integer("spectra.grid_per_axis", 4096)));
        CsvWriter out(out_dir + "/spectra.csv");
        const std::vector<std::string> names = {"q",     "d",          "C",
                                                "c",     "ratio",      "quad_order",
                                                "grid_points"};
        out.header(names);
        const double row[] = {static_cast<double>(rep.q),     static_cast<double>(rep.d),
                              rep.C,                          rep.c,
                              rep.ratio,                      static_cast<double>(rep.quad_order),
                              static_cast<double>(rep.grid_points)};
        out.row(row);
        out.close();
        write_meta(out_dir, timer.seconds());
        std::printf("spectra: q=%d d=%d C=%s c=%s ratio=%s\n", rep.q, rep.d,
                    format_double(rep.C).c_str(), format_double(rep.c).c_str(),
                    format_double(rep.ratio).c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}

int cmd_frontier(const Config& cfg) {
    try {
        const Timer timer;
        const ProblemBundle bundle = build_problem(cfg);
        const LambdaDistribution dist = build_distribution(cfg);
        const std::string out_dir = resolve_output_dir(cfg);
        const std::vector<double> deltas = cfg.numbers("method.deltas");
        if (deltas.empty()) throw std::runtime_error("method.deltas must be a nonempty array");
        const double c1 = cfg.number("method.c1", 1.0);
        const double c2 = cfg.number("method.c2", 0.5);
        const int refine = static_cast<int>(cfg.integer("frontier.refine", 16));
        GroundTruthSpec spec;
        spec.iterations = cfg.integer("groundtruth.iterations", 5000);
        spec.grad_tol = cfg.number("groundtruth.grad_tol", 1e-12);

        CsvWriter out(out_dir + "/frontier.csv");
        const std::vector<std::string> names = {"delta",          "points_per_axis",
                                                "steps_per_point", "gradient_calls",
                                                "grid_pass_error", "eps_sp"};
        out.header(names);
        for (const double delta : deltas) {
            const DiscretizationSchedule schedule = make_schedule(delta, c1, c2);
            BaselineRun run =
                run_discretization(bundle.problem, dist.lower(), dist.upper(), schedule);
            if (run.trace.gradient_calls != schedule.total_gradient_calls(dist.dim()))
                throw std::runtime_error("frontier: gradient-call accounting mismatch at delta=" +
                                         format_double(delta));
            std::vector<std::vector<double>> grid_nodes;
            grid_nodes.reserve(run.path.size());
            for (std::size_t i = 0; i < run.path.size(); ++i)
                grid_nodes.push_back(run.path.node(i));
            const GroundTruthGrid node_truth =
                compute_ground_truth(bundle.problem, grid_nodes, spec);
            const double gpe = grid_pass_error(run.path, bundle.problem, node_truth.theta);

            const int n = schedule.points_per_axis;
            const int fine = n == 1 ? 1 : (n - 1) * refine + 1;
            const std::vector<int> fine_pts(static_cast<std::size_t>(dist.dim()), fine);
            const GroundTruthGrid fine_truth = compute_ground_truth(
                bundle.problem, uniform_grid_nodes(dist.lower(), dist.upper(), fine_pts), spec);
            const PathErrorReport rep = path_error(
                bundle.problem,
                [&](std::span<const double> lambda) { return run.path.lookup(lambda); },
                fine_truth);

            const double row[] = {delta,
                                  static_cast<double>(schedule.points_per_axis),
                                  static_cast<double>(schedule.steps_per_point),
                                  static_cast<double>(run.trace.gradient_calls),
                                  gpe,
                                  rep.eps_sp};
            out.row(row);
        }
        out.close();
        write_meta(out_dir, timer.seconds());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}

int cmd_compare(const std::vector<Config>& cfgs) {
    try {
        const Timer timer;
        if (cfgs.empty()) throw std::runtime_error("compare: need at least one config");
        const std::string out_dir = resolve_output_dir(cfgs.front());
        CsvWriter out(out_dir + "/compare.csv");
        const std::vector<std::string> names = {"method", "gradient_calls", "eps_sp"};
        out.header(names);
        for (const Config& cfg : cfgs) {
            const ProblemBundle bundle = build_problem(cfg);
            const LambdaDistribution dist = build_distribution(cfg);
            const std::string method = cfg.str("method.name");
            std::string label = cfg.str("compare.label", "");
            if (method == "lsp" || method == "alsp") {
                const std::optional<GroundTruthGrid> truth =
                    ensure_ground_truth(cfg, bundle, dist, out_dir);
                if (!truth)
                    throw std::runtime_error(
                        "compare: config '" + cfg.origin() +
                        "' needs ground truth for path error (set groundtruth.points)");
                const LearnOutcome res = do_learn_run(cfg, bundle, dist, truth);
                if (res.trace.diverged)
                    throw std::runtime_error("compare: run '" + cfg.origin() + "' diverged");
                if (label.empty())
                    label = method + "_q" + std::to_string(static_cast<int>(cfg.integer("basis.q")));
                for (const TraceRow& r : res.trace.rows) {
                    if (!r.has_path_error) continue;
                    const std::string cells[] = {label, std::to_string(r.gradient_calls),
                                                 format_double(r.path_error)};
                    out.row(cells);
                }
            } else if (method == "discretization") {
                if (label.empty()) label = "discretization";
                std::vector<double> deltas;
                if (cfg.has("method.deltas")) deltas = cfg.numbers("method.deltas");
                else deltas.push_back(cfg.number("method.delta"));
                const double c1 = cfg.number("method.c1", 1.0);
                const double c2 = cfg.number("method.c2", 0.5);
                const int refine = static_cast<int>(cfg.integer("frontier.refine", 16));
                GroundTruthSpec spec;
                spec.iterations = cfg.integer("groundtruth.iterations", 5000);
                spec.grad_tol = cfg.number("groundtruth.grad_tol", 1e-12);
                for (const double delta : deltas) {
                    const DiscretizationSchedule schedule = make_schedule(delta, c1, c2);
                    BaselineRun run = run_discretization(bundle.problem, dist.lower(),
                                                         dist.upper(), schedule);
                    const int n = schedule.points_per_axis;
                    const int fine = n == 1 ? 1 : (n - 1) * refine + 1;
                    const std::vector<int> fine_pts(static_cast<std::size_t>(dist.dim()), fine);
                    const GroundTruthGrid fine_truth = compute_ground_truth(
                        bundle.problem, uniform_grid_nodes(dist.lower(), dist.upper(), fine_pts),
                        spec);
                    const PathErrorReport rep = path_error(
                        bundle.problem,
                        [&](std::span<const double> lambda) { return run.path.lookup(lambda); },
                        fine_truth);
                    const std::string cells[] = {label, std::to_string(run.trace.gradient_calls),
                                                 format_double(rep.eps_sp)};
                    out.row(cells);
                }
            } else {
                throw std::runtime_error("compare: method.name '" + method + "' unknown");
            }
        }
        out.close();
        write_meta(out_dir, timer.seconds());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}

}  // namespace solpath
