#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "solpath/baseline.hpp"
#include "solpath/basis.hpp"
#include "solpath/distribution.hpp"
#include "solpath/evaluate.hpp"
#include "solpath/optimize.hpp"
#include "solpath/pathlearn.hpp"
#include "solpath/problems.hpp"
#include "solpath/spectral.hpp"

namespace py = pybind11;
using namespace solpath;

namespace {

Coefficients make_coefficients(const Basis& basis, const std::vector<double>& values) {
    if (values.size() != static_cast<std::size_t>(basis.p()))
        throw std::invalid_argument("coefficient vector must have length q*d");
    return Coefficients{basis.id(), values};
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        auto r = m.row(i);
        rows[i].assign(r.begin(), r.end());
    }
    return rows;
}

std::vector<Coefficients> make_samples(const Basis& basis,
                                       const std::vector<std::vector<double>>& values) {
    std::vector<Coefficients> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(make_coefficients(basis, v));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "learned solution paths for parametric convex problems";

    py::class_<Basis>(m, "Basis")
        .def_static("legendre", &Basis::legendre, py::arg("q"), py::arg("d"))
        .def_static("shifted_legendre", &Basis::shifted_legendre, py::arg("q"), py::arg("d"),
                    py::arg("lo"), py::arg("hi"))
        .def_static("shifted_jacobi", &Basis::shifted_jacobi, py::arg("q"), py::arg("d"),
                    py::arg("a"), py::arg("b"), py::arg("lo") = 0.0, py::arg("hi") = 1.0)
        .def_static("tensor_legendre_2d", &Basis::tensor_legendre_2d, py::arg("q"), py::arg("d"),
                    py::arg("lo"), py::arg("hi"))
        .def_static("monomial", &Basis::monomial, py::arg("q"), py::arg("d"),
                    py::arg("lo") = -1.0, py::arg("hi") = 1.0)
        .def_static("portfolio_custom_12d", &Basis::portfolio_custom_12d, py::arg("q"),
                    py::arg("d"), py::arg("lo") = std::vector<double>{},
                    py::arg("hi") = std::vector<double>{})
        .def_property_readonly("q", &Basis::q)
        .def_property_readonly("d", &Basis::d)
        .def_property_readonly("p", &Basis::p)
        .def_property_readonly("lambda_dim", &Basis::lambda_dim)
        .def_property_readonly("id", &Basis::id)
        .def("features",
             [](const Basis& b, const std::vector<double>& lam) { return b.eval_features(lam); },
             py::arg("lam"))
        .def("apply",
             [](const Basis& b, const std::vector<double>& beta, const std::vector<double>& lam) {
                 return b.apply(make_coefficients(b, beta), lam);
             },
             py::arg("beta"), py::arg("lam"))
        .def("extend", &Basis::extend)
        .def("extension_index_map", &Basis::extension_index_map);

    py::class_<QuadratureRule>(m, "QuadratureRule")
        .def_readonly("nodes", &QuadratureRule::nodes)
        .def_readonly("weights", &QuadratureRule::weights)
        .def_readonly("order_per_axis", &QuadratureRule::order_per_axis)
        .def_property_readonly("size", &QuadratureRule::size);

    py::class_<LambdaDistribution>(m, "LambdaDistribution")
        .def_static("uniform_box", &LambdaDistribution::uniform_box, py::arg("lo"), py::arg("hi"))
        .def_static("beta", &LambdaDistribution::beta, py::arg("alpha"), py::arg("beta"))
        .def_static("tensor_uniform_2d", &LambdaDistribution::tensor_uniform_2d, py::arg("lo"),
                    py::arg("hi"))
        .def_property_readonly("dim", &LambdaDistribution::dim)
        .def_property_readonly("lower", &LambdaDistribution::lower)
        .def_property_readonly("upper", &LambdaDistribution::upper)
        .def("quadrature", &LambdaDistribution::quadrature, py::arg("order"))
        .def("sample",
             [](const LambdaDistribution& dist, int n, std::uint64_t seed) {
                 Rng rng(seed);
                 std::vector<std::vector<double>> out;
                 out.reserve(static_cast<std::size_t>(n));
                 for (int i = 0; i < n; ++i) out.push_back(dist.sample(rng));
                 return out;
             },
             py::arg("n"), py::arg("seed") = 0);

    py::class_<MarketModel>(m, "MarketModel")
        .def_readonly("mean", &MarketModel::mean)
        .def_property_readonly("cov", [](const MarketModel& mm) { return matrix_rows(mm.cov); })
        .def_property_readonly("d", &MarketModel::d);

    py::class_<ClassificationData>(m, "ClassificationData")
        .def_readonly("y", &ClassificationData::y)
        .def_property_readonly("x", [](const ClassificationData& c) { return matrix_rows(c.x); })
        .def_property_readonly("positives", &ClassificationData::positives)
        .def_property_readonly("negatives", &ClassificationData::negatives);

    py::class_<ParametricProblem>(m, "ParametricProblem")
        .def_readonly("name", &ParametricProblem::name)
        .def_readonly("dim_theta", &ParametricProblem::dim_theta)
        .def_readonly("dim_lambda", &ParametricProblem::dim_lambda)
        .def_readonly("mu", &ParametricProblem::mu)
        .def_readonly("L", &ParametricProblem::L)
        .def("value",
             [](const ParametricProblem& p, const std::vector<double>& theta,
                const std::vector<double>& lam) { return p.value(theta, lam); })
        .def("gradient",
             [](const ParametricProblem& p, const std::vector<double>& theta,
                const std::vector<double>& lam) { return p.gradient(theta, lam); });

    m.def("quadratic_toy_path", &quadratic_toy_path, py::arg("path_name"));
    m.def("toy_path_value", &toy_path_value, py::arg("path_name"), py::arg("lam"));
    m.def("synth_classification", &synth_classification, py::arg("seed"), py::arg("n"),
          py::arg("d"), py::arg("imbalance") = 0.044, py::arg("standardize") = false,
          py::arg("intercept") = false);
    m.def("synth_market", &synth_market, py::arg("seed"), py::arg("d"), py::arg("eig_lo") = 0.5,
          py::arg("eig_hi") = 1.5, py::arg("mean_scale") = 0.1);
    m.def("weighted_logistic", &weighted_logistic, py::arg("data"), py::arg("ridge") = 0.125);
    m.def("portfolio_2d", &portfolio_2d, py::arg("market"), py::arg("lam2_lo") = 0.2,
          py::arg("lam2_hi") = 1.0);
    m.def("portfolio_12d", &portfolio_12d, py::arg("market"), py::arg("lam2_lo") = 0.2,
          py::arg("lam2_hi") = 1.0);
    m.def("analytic_path_12d",
          [](const MarketModel& market, const std::vector<double>& lam) {
              std::vector<double> theta(static_cast<std::size_t>(market.d()));
              analytic_path_12d(market, lam, theta);
              return theta;
          },
          py::arg("market"), py::arg("lam"));

    m.def("compute_C",
          [](const Basis& basis) { return compute_C(basis, default_C_grid(basis)); },
          py::arg("basis"));
    m.def("compute_c", &compute_c, py::arg("basis"), py::arg("rule"));

    py::class_<SpectralReport>(m, "SpectralReport")
        .def_readonly("C", &SpectralReport::C)
        .def_readonly("c", &SpectralReport::c)
        .def_readonly("ratio", &SpectralReport::ratio)
        .def_readonly("q", &SpectralReport::q)
        .def_readonly("d", &SpectralReport::d);
    m.def("spectral_report", &spectral_report, py::arg("basis"), py::arg("dist"),
          py::arg("quad_order"), py::arg("grid_per_axis") = 4096);

    py::class_<TraceRow>(m, "TraceRow")
        .def_readonly("iteration", &TraceRow::iteration)
        .def_readonly("gradient_calls", &TraceRow::gradient_calls)
        .def_readonly("step_size", &TraceRow::step_size)
        .def_readonly("objective", &TraceRow::objective)
        .def_readonly("path_error", &TraceRow::path_error)
        .def_readonly("stage", &TraceRow::stage)
        .def_readonly("has_objective", &TraceRow::has_objective)
        .def_readonly("has_path_error", &TraceRow::has_path_error);

    py::class_<RunTrace>(m, "RunTrace")
        .def_readonly("rows", &RunTrace::rows)
        .def_readonly("gradient_calls", &RunTrace::gradient_calls)
        .def_readonly("diverged", &RunTrace::diverged)
        .def_readonly("divergence_note", &RunTrace::divergence_note);

    py::class_<GroundTruthGrid>(m, "GroundTruthGrid")
        .def_readonly("problem_name", &GroundTruthGrid::problem_name)
        .def_readonly("nodes", &GroundTruthGrid::nodes)
        .def_property_readonly("theta",
                               [](const GroundTruthGrid& g) { return matrix_rows(g.theta); })
        .def_readonly("h_star", &GroundTruthGrid::h_star)
        .def_readonly("residual", &GroundTruthGrid::residual)
        .def_property_readonly("max_residual", &GroundTruthGrid::max_residual);

    m.def("uniform_grid_nodes", &uniform_grid_nodes, py::arg("lo"), py::arg("hi"),
          py::arg("points_per_axis"));
    m.def("compute_ground_truth",
          [](const ParametricProblem& problem, const std::vector<std::vector<double>>& nodes,
             long iterations, double grad_tol, double residual_tol) {
              GroundTruthSpec spec;
              spec.iterations = iterations;
              spec.grad_tol = grad_tol;
              spec.residual_tol = residual_tol;
              return compute_ground_truth(problem, nodes, spec);
          },
          py::arg("problem"), py::arg("nodes"), py::arg("iterations") = 5000,
          py::arg("grad_tol") = 1e-12, py::arg("residual_tol") = 1e-7);
    m.def("analytic_ground_truth_12d", &analytic_ground_truth_12d, py::arg("problem"),
          py::arg("market"), py::arg("nodes"));
    m.def("path_error_sup",
          [](const ParametricProblem& problem, const Basis& basis,
             const std::vector<double>& beta, const GroundTruthGrid& truth) {
              return path_error_sup(problem, basis, beta, truth);
          },
          py::arg("problem"), py::arg("basis"), py::arg("beta"), py::arg("truth"));

    m.def("run_lsp",
          [](const ParametricProblem& problem, const Basis& basis, const LambdaDistribution& dist,
             long iterations, double eta_bar, std::uint64_t seed, long record_every,
             const QuadratureRule* fhat_rule, const GroundTruthGrid* truth, bool diagnostic) {
              SgdConfig cfg;
              cfg.iterations = iterations;
              cfg.eta_bar = eta_bar;
              cfg.seed = seed;
              cfg.record_every = record_every;
              cfg.diagnostic.enabled = diagnostic;
              LspOptions opts;
              opts.fhat_rule = fhat_rule;
              if (truth)
                  opts.path_error = [&problem, truth](const Basis& b,
                                                      std::span<const double> values) {
                      return path_error_sup(problem, b, values, *truth);
                  };
              SgdResult res = run_lsp(problem, basis, dist, cfg, opts);
              return py::make_tuple(res.beta.values, res.trace, res.C_used, res.final_step);
          },
          py::arg("problem"), py::arg("basis"), py::arg("dist"), py::arg("iterations"),
          py::arg("eta_bar") = 1.0, py::arg("seed") = 0, py::arg("record_every") = 100,
          py::arg("fhat_rule") = nullptr, py::arg("truth") = nullptr,
          py::arg("diagnostic") = false);

    py::class_<StageResult>(m, "StageResult")
        .def_readonly("stage", &StageResult::stage)
        .def_readonly("q", &StageResult::q)
        .def_property_readonly("beta",
                               [](const StageResult& s) { return s.beta.values; })
        .def_readonly("start_iteration", &StageResult::start_iteration)
        .def_readonly("end_iteration", &StageResult::end_iteration)
        .def_readonly("gradient_calls", &StageResult::gradient_calls)
        .def_readonly("fhat_end", &StageResult::fhat_end)
        .def_readonly("path_error_end", &StageResult::path_error_end);

    m.def("run_alsp",
          [](const ParametricProblem& problem, const Basis& initial,
             const LambdaDistribution& dist, const QuadratureRule& fhat_rule, long iterations,
             int max_q, double eta_bar, std::uint64_t seed, int stall_window, double stall_tol,
             long eval_cadence, const GroundTruthGrid* truth) {
              AlspConfig cfg;
              cfg.max_q = max_q;
              cfg.stall_window = stall_window;
              cfg.stall_tol = stall_tol;
              cfg.eval_cadence = eval_cadence;
              cfg.sgd.iterations = iterations;
              cfg.sgd.eta_bar = eta_bar;
              cfg.sgd.seed = seed;
              PathErrorFn pe;
              if (truth)
                  pe = [&problem, truth](const Basis& b, std::span<const double> values) {
                      return path_error_sup(problem, b, values, *truth);
                  };
              AlspResult res = run_alsp(problem, initial, dist, cfg, fhat_rule, pe);
              return py::make_tuple(res.stages, res.trace, res.basis, res.beta.values,
                                    res.stop_reason);
          },
          py::arg("problem"), py::arg("initial"), py::arg("dist"), py::arg("fhat_rule"),
          py::arg("iterations"), py::arg("max_q") = 12, py::arg("eta_bar") = 1.0,
          py::arg("seed") = 0, py::arg("stall_window") = 3, py::arg("stall_tol") = 1e-3,
          py::arg("eval_cadence") = 200, py::arg("truth") = nullptr);

    m.def("fhat_value",
          [](const ParametricProblem& problem, const Basis& basis, const QuadratureRule& rule,
             const std::vector<double>& beta) { return fhat_value(problem, basis, rule, beta); });

    py::class_<DiscretizationSchedule>(m, "DiscretizationSchedule")
        .def_readonly("delta", &DiscretizationSchedule::delta)
        .def_readonly("points_per_axis", &DiscretizationSchedule::points_per_axis)
        .def_readonly("steps_per_point", &DiscretizationSchedule::steps_per_point)
        .def("total_gradient_calls", &DiscretizationSchedule::total_gradient_calls,
             py::arg("dim"));
    m.def("make_schedule", &make_schedule, py::arg("delta"), py::arg("c1"), py::arg("c2"));

    py::class_<PiecewisePath>(m, "PiecewisePath")
        .def_property_readonly("size", &PiecewisePath::size)
        .def("node", &PiecewisePath::node, py::arg("index"))
        .def("lookup",
             [](const PiecewisePath& p, const std::vector<double>& lam) { return p.lookup(lam); },
             py::arg("lam"));

    py::class_<BaselineRun>(m, "BaselineRun")
        .def_readonly("path", &BaselineRun::path)
        .def_readonly("trace", &BaselineRun::trace);
    m.def("run_discretization", &run_discretization, py::arg("problem"), py::arg("lo"),
          py::arg("hi"), py::arg("schedule"));

    py::class_<AuditRow>(m, "AuditRow")
        .def_readonly("sample", &AuditRow::sample)
        .def_readonly("lhs", &AuditRow::lhs)
        .def_readonly("rhs", &AuditRow::rhs)
        .def_readonly("slack", &AuditRow::slack);
    py::class_<AuditReport>(m, "AuditReport")
        .def_readonly("kind", &AuditReport::kind)
        .def_readonly("rows", &AuditReport::rows)
        .def_readonly("min_slack", &AuditReport::min_slack)
        .def_readonly("passed", &AuditReport::pass)
        .def_readonly("eps_star_ub", &AuditReport::eps_star_ub)
        .def_readonly("f_star", &AuditReport::f_star);
    m.def("rwgc_audit",
          [](const ParametricProblem& problem, const Basis& basis, const QuadratureRule& rule,
             const std::vector<std::vector<double>>& betas, double eps_star_ub) {
              return rwgc_audit(problem, basis, rule, make_samples(basis, betas), eps_star_ub);
          },
          py::arg("problem"), py::arg("basis"), py::arg("rule"), py::arg("betas"),
          py::arg("eps_star_ub") = 0.0);
    m.def("decomposition_audit",
          [](const ParametricProblem& problem, const Basis& basis, const QuadratureRule& rule,
             const GroundTruthGrid& truth, const std::vector<std::vector<double>>& betas,
             double eps_star_ub) {
              return decomposition_audit(problem, basis, rule, truth,
                                         make_samples(basis, betas), eps_star_ub);
          },
          py::arg("problem"), py::arg("basis"), py::arg("rule"), py::arg("truth"),
          py::arg("betas"), py::arg("eps_star_ub") = 0.0);

    m.def("chebyshev_coeffs",
          [](const std::function<double(double)>& f, int degree) {
              return chebyshev_coeffs(f, degree);
          },
          py::arg("f"), py::arg("degree"));
    m.def("chebyshev_eval",
          [](const std::vector<double>& coeffs, double x) { return chebyshev_eval(coeffs, x); },
          py::arg("coeffs"), py::arg("x"));
    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("omega", &DecayFit::omega)
        .def_readonly("order", &DecayFit::order)
        .def_readonly("r2_geometric", &DecayFit::r2_geometric)
        .def_readonly("r2_algebraic", &DecayFit::r2_algebraic)
        .def_readonly("points", &DecayFit::points);
    m.def("decay_fit",
          [](const std::vector<double>& coeffs, int n_min, double rel_floor) {
              return decay_fit(coeffs, n_min, rel_floor);
          },
          py::arg("coeffs"), py::arg("n_min") = 2, py::arg("rel_floor") = 1e-13);
    m.def("truncation_path_error_bound", &truncation_path_error_bound, py::arg("truth"),
          py::arg("degree"), py::arg("L"), py::arg("cheb_samples") = 256);
}
