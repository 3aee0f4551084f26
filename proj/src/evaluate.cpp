#include "solpath/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "solpath/csvio.hpp"
#include "solpath/rng.hpp"
#include "solpath/spectral.hpp"

namespace solpath {

namespace {

std::string node_string(std::span<const double> lambda) {
    std::string s = "(";
    for (std::size_t k = 0; k < lambda.size(); ++k)
        s += (k ? "," : "") + format_double(lambda[k]);
    return s + ")";
}

constexpr double kSlackTol = 1e-9;

bool row_passes(const AuditRow& row) {
    return row.slack >= -kSlackTol * std::max(1.0, std::fabs(row.rhs));
}

}  // namespace

double GroundTruthGrid::max_residual() const {
    double worst = 0.0;
    for (double r : residual) worst = std::max(worst, r);
    return worst;
}

std::vector<std::vector<double>> uniform_grid_nodes(const std::vector<double>& lo,
                                                    const std::vector<double>& hi,
                                                    const std::vector<int>& points_per_axis) {
    const std::size_t dim = lo.size();
    if (hi.size() != dim || points_per_axis.size() != dim || dim == 0)
        throw std::invalid_argument("uniform_grid_nodes: inconsistent box specification");
    std::size_t total = 1;
    for (int n : points_per_axis) {
        if (n < 1) throw std::invalid_argument("uniform_grid_nodes: need >= 1 point per axis");
        total *= static_cast<std::size_t>(n);
    }
    auto coord = [&](std::size_t axis, int i) {
        const int n = points_per_axis[axis];
        if (n == 1) return 0.5 * (lo[axis] + hi[axis]);
        return lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(i) / (n - 1);
    };
    std::vector<std::vector<double>> nodes(total, std::vector<double>(dim));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t k = dim; k-- > 0;) {
            const int n = points_per_axis[k];
            nodes[idx][k] = coord(k, static_cast<int>(rest % static_cast<std::size_t>(n)));
            rest /= static_cast<std::size_t>(n);
        }
    }
    return nodes;
}

GroundTruthGrid compute_ground_truth(const ParametricProblem& problem,
                                     const std::vector<std::vector<double>>& nodes,
                                     const GroundTruthSpec& spec) {
    if (nodes.empty()) throw std::invalid_argument("compute_ground_truth: no nodes");
    GroundTruthGrid grid;
    grid.problem_name = problem.name;
    grid.nodes = nodes;
    grid.theta = Matrix(nodes.size(), static_cast<std::size_t>(problem.dim_theta));
    grid.h_star.resize(nodes.size());
    grid.residual.resize(nodes.size());
    const double step = 1.0 / problem.L;
    std::vector<double> warm(static_cast<std::size_t>(problem.dim_theta), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (static_cast<int>(nodes[i].size()) != problem.dim_lambda)
            throw std::invalid_argument("compute_ground_truth: node dimension mismatch");
        GdResult res =
            gd_solve(problem, nodes[i], warm, spec.iterations, step, spec.grad_tol);
        if (spec.enforce_residual && !(res.grad_norm <= spec.residual_tol))
            throw std::runtime_error("compute_ground_truth: node " + std::to_string(i) + " " +
                                     node_string(nodes[i]) + " residual " +
                                     format_double(res.grad_norm) + " exceeds " +
                                     format_double(spec.residual_tol));
        auto dst = grid.theta.row(i);
        std::copy(res.theta.begin(), res.theta.end(), dst.begin());
        grid.h_star[i] = res.value;
        grid.residual[i] = res.grad_norm;
        warm = res.theta;
    }
    return grid;
}

GroundTruthGrid analytic_ground_truth_12d(const ParametricProblem& problem,
                                          const MarketModel& market,
                                          const std::vector<std::vector<double>>& nodes) {
    if (nodes.empty()) throw std::invalid_argument("analytic_ground_truth_12d: no nodes");
    GroundTruthGrid grid;
    grid.problem_name = problem.name;
    grid.nodes = nodes;
    grid.theta = Matrix(nodes.size(), static_cast<std::size_t>(problem.dim_theta));
    grid.h_star.resize(nodes.size());
    grid.residual.resize(nodes.size());
    std::vector<double> g(static_cast<std::size_t>(problem.dim_theta));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto dst = grid.theta.row(i);
        analytic_path_12d(market, nodes[i], dst);
        grid.h_star[i] = problem.value_grad(dst, nodes[i], std::span<double>(g));
        grid.residual[i] = norm2(g);
    }
    return grid;
}

void ground_truth_to_csv(const GroundTruthGrid& grid, const std::string& path) {
    CsvWriter out(path);
    out.comment("problem=" + grid.problem_name);
    std::vector<std::string> names;
    for (int k = 0; k < grid.dim_lambda(); ++k) names.push_back("lambda_" + std::to_string(k));
    for (int i = 0; i < grid.d(); ++i) names.push_back("theta_" + std::to_string(i));
    names.push_back("h_star");
    names.push_back("residual");
    out.header(names);
    std::vector<double> row(names.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::size_t c = 0;
        for (double v : grid.nodes[i]) row[c++] = v;
        for (double v : grid.theta.row(i)) row[c++] = v;
        row[c++] = grid.h_star[i];
        row[c++] = grid.residual[i];
        out.row(row);
    }
    out.close();
}

GroundTruthGrid ground_truth_from_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    GroundTruthGrid grid;
    for (const std::string& c : table.comments)
        if (c.rfind("problem=", 0) == 0) grid.problem_name = c.substr(8);
    int dim = 0, d = 0;
    for (const std::string& name : table.header) {
        if (name.rfind("lambda_", 0) == 0) ++dim;
        if (name.rfind("theta_", 0) == 0) ++d;
    }
    if (dim == 0 || d == 0 || table.header.size() != static_cast<std::size_t>(dim + d) + 2)
        throw std::runtime_error(path + ": not a ground-truth table");
    const std::size_t n = table.rows.size();
    grid.nodes.assign(n, std::vector<double>(static_cast<std::size_t>(dim)));
    grid.theta = Matrix(n, static_cast<std::size_t>(d));
    grid.h_star.resize(n);
    grid.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        for (int k = 0; k < dim; ++k) grid.nodes[i][static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k)];
        for (int j = 0; j < d; ++j) grid.theta(i, static_cast<std::size_t>(j)) = row[static_cast<std::size_t>(dim + j)];
        grid.h_star[i] = row[static_cast<std::size_t>(dim + d)];
        grid.residual[i] = row[static_cast<std::size_t>(dim + d) + 1];
    }
    return grid;
}

PathErrorReport path_error(const ParametricProblem& problem, const PathCallable& path,
                           const GroundTruthGrid& truth) {
    PathErrorReport rep;
    rep.gaps.resize(truth.size());
    rep.eps_sp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const std::vector<double> theta = path(truth.nodes[i]);
        const double gap = problem.value(theta, truth.nodes[i]) - truth.h_star[i];
        rep.gaps[i] = gap;
        if (gap > rep.eps_sp) {
            rep.eps_sp = gap;
            rep.argmax = i;
        }
    }
    return rep;
}

PathErrorReport path_error(const ParametricProblem& problem, const Basis& basis,
                           std::span<const double> beta_values, const GroundTruthGrid& truth) {
    return path_error(
        problem,
        [&](std::span<const double> lambda) {
            std::vector<double> theta(static_cast<std::size_t>(basis.d()));
            std::vector<double> feats(static_cast<std::size_t>(basis.q()));
            basis.eval_features(lambda, feats);
            basis.apply_features(feats, beta_values, theta);
            return theta;
        },
        truth);
}

double path_error_sup(const ParametricProblem& problem, const Basis& basis,
                      std::span<const double> beta_values, const GroundTruthGrid& truth) {
    std::vector<double> feats(static_cast<std::size_t>(basis.q()));
    std::vector<double> theta(static_cast<std::size_t>(basis.d()));
    std::vector<double> grad(static_cast<std::size_t>(basis.d()));
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < truth.size(); ++i) {
        basis.eval_features_unchecked(truth.nodes[i].data(), feats.data());
        basis.apply_features(feats, beta_values, theta);
        const double gap =
            problem.value_grad(theta, truth.nodes[i], std::span<double>(grad)) - truth.h_star[i];
        worst = std::max(worst, gap);
    }
    return worst;
}

std::vector<Coefficients> sample_betas(const Basis& basis, const Coefficients& center, int n,
                                       double radius, std::uint64_t seed) {
    if (center.basis_id != basis.id())
        throw std::invalid_argument("sample_betas: center bound to a different basis");
    Rng rng(seed);
    std::vector<Coefficients> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        Coefficients b = center;
        for (double& v : b.values) v += radius * rng.normal();
        out.push_back(std::move(b));
    }
    return out;
}

namespace {

SpectralConstants resolve_constants(const ParametricProblem& problem, const Basis& basis,
                                    const QuadratureRule& rule, bool need_c,
                                    const SpectralConstants* override_constants) {
    SpectralConstants k;
    if (override_constants) k = *override_constants;
    if (k.L <= 0.0) k.L = problem.L;
    if (k.mu <= 0.0) k.mu = problem.mu;
    if (k.C <= 0.0) k.C = compute_C(basis, default_C_grid(basis));
    if (k.c <= 0.0 && need_c) k.c = compute_c(basis, rule);
    return k;
}

}  // namespace

AuditReport rwgc_audit(const ParametricProblem& problem, const Basis& basis,
                       const QuadratureRule& rule, const std::vector<Coefficients>& betas,
                       double eps_star_ub, const SpectralConstants* constants) {
    if (betas.empty()) throw std::invalid_argument("rwgc_audit: no coefficient samples");
    AuditReport rep;
    rep.kind = "rwgc";
    rep.eps_star_ub = eps_star_ub;
    rep.constants = resolve_constants(problem, basis, rule, false, constants);

    const Coefficients beta_star = gd_minimize_fhat(problem, basis, rule, 1e-10);
    rep.f_star = fhat_value(problem, basis, rule, beta_star.values);
    rep.f_star_grad_norm = norm2(fhat_gradient(problem, basis, rule, beta_star.values));

    const double twoCL = 2.0 * rep.constants.C * rep.constants.L;
    std::vector<double> feats(static_cast<std::size_t>(basis.q()));
    std::vector<double> theta(static_cast<std::size_t>(basis.d()));
    std::vector<double> grad(static_cast<std::size_t>(basis.d()));
    rep.min_slack = std::numeric_limits<double>::infinity();
    rep.pass = true;
    for (std::size_t s = 0; s < betas.size(); ++s) {
        if (betas[s].basis_id != basis.id())
            throw std::invalid_argument("rwgc_audit: sample " + std::to_string(s) +
                                        " bound to a different basis");
        // ||Phi' grad h||^2 factors as ||psi||^2 ||grad h||^2 for block-diagonal Phi.
        const double lhs = expect(rule, [&](std::span<const double> lambda) {
            basis.eval_features_unchecked(lambda.data(), feats.data());
            basis.apply_features(feats, betas[s].values, theta);
            problem.value_grad(theta, lambda, std::span<double>(grad));
            return dot(feats, feats) * dot(grad, grad);
        });
        const double f = fhat_value(problem, basis, rule, betas[s].values);
        const double rhs = twoCL * (f - rep.f_star) + twoCL * eps_star_ub;
        AuditRow row{static_cast<long>(s), lhs, rhs, rhs - lhs};
        rep.min_slack = std::min(rep.min_slack, row.slack);
        rep.pass = rep.pass && row_passes(row);
        rep.rows.push_back(row);
    }
    return rep;
}

AuditReport decomposition_audit(const ParametricProblem& problem, const Basis& basis,
                                const QuadratureRule& rule, const GroundTruthGrid& truth,
                                const std::vector<Coefficients>& betas, double eps_star_ub,
                                const SpectralConstants* constants) {
    if (betas.empty()) throw std::invalid_argument("decomposition_audit: no coefficient samples");
    AuditReport rep;
    rep.kind = "decomposition";
    rep.eps_star_ub = eps_star_ub;
    rep.constants = resolve_constants(problem, basis, rule, true, constants);

    const Coefficients beta_star = gd_minimize_fhat(problem, basis, rule, 1e-10);
    rep.f_star = fhat_value(problem, basis, rule, beta_star.values);
    rep.f_star_grad_norm = norm2(fhat_gradient(problem, basis, rule, beta_star.values));

    const double twoCL = 2.0 * rep.constants.C * rep.constants.L;
    const double tail = 8.0 * rep.constants.C * rep.constants.L /
                        (rep.constants.c * rep.constants.mu) * eps_star_ub;
    rep.min_slack = std::numeric_limits<double>::infinity();
    rep.pass = true;
    for (std::size_t s = 0; s < betas.size(); ++s) {
        if (betas[s].basis_id != basis.id())
            throw std::invalid_argument("decomposition_audit: sample " + std::to_string(s) +
                                        " bound to a different basis");
        const double lhs = path_error_sup(problem, basis, betas[s].values, truth);
        double dist2 = 0.0;
        for (std::size_t i = 0; i < betas[s].values.size(); ++i) {
            const double r = betas[s].values[i] - beta_star.values[i];
            dist2 += r * r;
        }
        const double rhs = twoCL * dist2 + tail;
        AuditRow row{static_cast<long>(s), lhs, rhs, rhs - lhs};
        rep.min_slack = std::min(rep.min_slack, row.slack);
        rep.pass = rep.pass && row_passes(row);
        rep.rows.push_back(row);
    }
    return rep;
}

void audit_to_csv(const AuditReport& report, const std::string& path) {
    CsvWriter out(path);
    out.comment("audit=" + report.kind + " pass=" + (report.pass ? "1" : "0") +
                " min_slack=" + format_double(report.min_slack) +
                " C=" + format_double(report.constants.C) +
                " c=" + format_double(report.constants.c) +
                " L=" + format_double(report.constants.L) +
                " mu=" + format_double(report.constants.mu) +
                " eps_star_ub=" + format_double(report.eps_star_ub) +
                " f_star=" + format_double(report.f_star) +
                " f_star_grad_norm=" + format_double(report.f_star_grad_norm));
    const std::vector<std::string> names = {"sample", "lhs", "rhs", "slack"};
    out.header(names);
    for (const AuditRow& row : report.rows) {
        const double vals[] = {static_cast<double>(row.sample), row.lhs, row.rhs, row.slack};
        out.row(vals);
    }
    out.close();
}

std::vector<double> chebyshev_coeffs(const std::function<double(double)>& f, int degree) {
    if (degree < 1) throw std::invalid_argument("chebyshev_coeffs: degree must be >= 1");
    const int n = degree;
    std::vector<double> samples(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        samples[static_cast<std::size_t>(k)] = f(std::cos(std::numbers::pi * k / n));
    std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double term =
                samples[static_cast<std::size_t>(k)] * std::cos(std::numbers::pi * j * k / n);
            s += (k == 0 || k == n) ? 0.5 * term : term;
        }
        a[static_cast<std::size_t>(j)] = 2.0 * s / n;
    }
    a.front() *= 0.5;
    a.back() *= 0.5;
    return a;
}

double chebyshev_eval(std::span<const double> coeffs, double x) {
    if (coeffs.empty()) return 0.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + coeffs[j];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + coeffs[0];
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n = static_cast<int>(x.size());
    if (syy <= 0.0) {
        fit.r2 = 1.0;  // constant data fitted exactly
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.slope * x[i] + fit.intercept);
            ss_res += r * r;
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

DecayFit decay_fit(std::span<const double> coeffs, int n_min, double rel_floor) {
    DecayFit fit;
    if (coeffs.size() < 3) return fit;
    double amax = 0.0;
    for (double a : coeffs) amax = std::max(amax, std::fabs(a));
    if (amax == 0.0) return fit;
    const double floor = amax * rel_floor;
    std::vector<double> ns, logn, loga;
    for (std::size_t n = static_cast<std::size_t>(std::max(n_min, 1)); n < coeffs.size(); ++n) {
        const double a = std::fabs(coeffs[n]);
        if (a <= floor) continue;
        ns.push_back(static_cast<double>(n));
        logn.push_back(std::log(static_cast<double>(n)));
        loga.push_back(std::log(a));
    }
    fit.points = static_cast<int>(ns.size());
    if (fit.points < 3) return fit;
    const LineFit geo = fit_line(ns, loga);
    const LineFit alg = fit_line(logn, loga);
    fit.omega = std::exp(-geo.slope);
    fit.r2_geometric = geo.r2;
    fit.order = -alg.slope - 1.0;
    fit.r2_algebraic = alg.r2;
    return fit;
}

double truncation_path_error_bound(const GroundTruthGrid& truth, int degree, double L,
                                   int cheb_samples) {
    if (truth.dim_lambda() != 1)
        throw std::invalid_argument("truncation_path_error_bound: 1-D lambda only");
    if (truth.size() < 2)
        throw std::invalid_argument("truncation_path_error_bound: need at least two nodes");
    if (degree < 0) throw std::invalid_argument("truncation_path_error_bound: negative degree");
    if (cheb_samples < 2)
        throw std::invalid_argument("truncation_path_error_bound: need cheb_samples >= 2");

    const std::size_t n = truth.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return truth.nodes[a][0] < truth.nodes[b][0];
    });
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = truth.nodes[order[i]][0];
    const double a = xs.front(), b = xs.back();
    if (!(b > a)) throw std::invalid_argument("truncation_path_error_bound: degenerate grid");

    const int keep = std::min(degree, cheb_samples) + 1;  // coefficients retained
    double worst_sup = 0.0;
    std::vector<double> column(n);
    for (int coord = 0; coord < truth.d(); ++coord) {
        for (std::size_t i = 0; i < n; ++i)
            column[i] = truth.theta(order[i], static_cast<std::size_t>(coord));
        auto interp = [&](double x) {
            const double lambda = a + 0.5 * (x + 1.0) * (b - a);
            auto it = std::upper_bound(xs.begin(), xs.end(), lambda);
            std::size_t hi = static_cast<std::size_t>(it - xs.begin());
            if (hi == 0) return column.front();
            if (hi >= n) return column.back();
            const std::size_t lo = hi - 1;
            const double t = (lambda - xs[lo]) / (xs[hi] - xs[lo]);
            return column[lo] + t * (column[hi] - column[lo]);
        };
        std::vector<double> coeffs = chebyshev_coeffs(interp, cheb_samples);
        std::span<const double> truncated(coeffs.data(), static_cast<std::size_t>(keep));
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = 2.0 * (xs[i] - a) / (b - a) - 1.0;
            sup = std::max(sup, std::fabs(column[i] - chebyshev_eval(truncated, x)));
        }
        worst_sup = std::max(worst_sup, sup);
    }
    return 0.5 * L * truth.d() * worst_sup * worst_sup;
}

}  // namespace solpath
