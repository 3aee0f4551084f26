#include "solpath/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace solpath {

double compute_C(const Basis& basis, const std::vector<std::vector<double>>& grid) {
    if (grid.empty()) throw std::invalid_argument("compute_C: empty grid");
    const int q = basis.q();
    std::vector<double> feats(static_cast<std::size_t>(q));
    double best = 0.0;
    for (const auto& pt : grid) {
        if (static_cast<int>(pt.size()) != basis.lambda_dim())
            throw std::invalid_argument("compute_C: grid point dimension mismatch");
        basis.eval_features(pt, feats);
        double s = 0.0;
        for (double f : feats) s += f * f;
        best = std::max(best, s);
    }
    if (!std::isfinite(best)) throw std::runtime_error("compute_C: non-finite feature norm");
    return best;
}

namespace {

void append_corners(const Basis& basis, std::vector<std::vector<double>>& grid) {
    const int dim = basis.lambda_dim();
    const auto& lo = basis.lower();
    const auto& hi = basis.upper();
    const std::size_t n = std::size_t{1} << dim;
    for (std::size_t mask = 0; mask < n; ++mask) {
        std::vector<double> pt(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k)
            pt[static_cast<std::size_t>(k)] = (mask >> k & 1) ? hi[static_cast<std::size_t>(k)]
                                                              : lo[static_cast<std::size_t>(k)];
        grid.push_back(std::move(pt));
    }
}

}  // namespace

std::vector<std::vector<double>> default_C_grid(const Basis& basis, int per_axis) {
    if (per_axis < 2) throw std::invalid_argument("default_C_grid: per_axis must be >= 2");
    const int dim = basis.lambda_dim();
    const auto& lo = basis.lower();
    const auto& hi = basis.upper();
    std::vector<std::vector<double>> grid;
    if (dim == 1) {
        grid.reserve(static_cast<std::size_t>(per_axis) + 2);
        for (int i = 0; i < per_axis; ++i) {
            double t = static_cast<double>(i) / (per_axis - 1);
            grid.push_back({lo[0] + t * (hi[0] - lo[0])});
        }
    } else if (dim == 2) {
        // Keep the total grid size manageable while staying dense per axis.
        int n = std::min(per_axis, 512);
        grid.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) + 4);
        for (int i = 0; i < n; ++i) {
            double t1 = static_cast<double>(i) / (n - 1);
            for (int j = 0; j < n; ++j) {
                double t2 = static_cast<double>(j) / (n - 1);
                grid.push_back({lo[0] + t1 * (hi[0] - lo[0]), lo[1] + t2 * (hi[1] - lo[1])});
            }
        }
    } else {
        std::vector<double> center(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k)
            center[static_cast<std::size_t>(k)] =
                0.5 * (lo[static_cast<std::size_t>(k)] + hi[static_cast<std::size_t>(k)]);
        grid.push_back(std::move(center));
    }
    append_corners(basis, grid);
    return grid;
}

Matrix feature_gram(const Basis& basis, const QuadratureRule& rule) {
    if (rule.dim() != basis.lambda_dim())
        throw std::invalid_argument("feature_gram: rule dimension mismatch");
    const int q = basis.q();
    Matrix gram(q, q);
    std::vector<double> feats(static_cast<std::size_t>(q));
    for (std::size_t k = 0; k < rule.size(); ++k) {
        basis.eval_features(rule.nodes[k], feats);
        const double w = rule.weights[k];
        for (int a = 0; a < q; ++a)
            for (int b = a; b < q; ++b)
                gram(a, b) += w * feats[static_cast<std::size_t>(a)] *
                              feats[static_cast<std::size_t>(b)];
    }
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < a; ++b) gram(a, b) = gram(b, a);
    return gram;
}

double compute_c(const Basis& basis, const QuadratureRule& rule) {
    const int q = basis.q();
    if (basis.kind() == BasisKind::portfolio_custom_12d) {
        // No tensor quadrature is practical in 12 lambda dimensions; accept
        // only Monte Carlo rules, giving a consistent estimate of c.
        if (rule.order_per_axis != 0)
            throw std::invalid_argument(
                "compute_c: use a sampled rule (sample_rule) for the 12-d family");
    } else {
        int needed = q;
        if (basis.kind() == BasisKind::tensor_legendre_2d)
            needed = static_cast<int>(std::lround(std::sqrt(static_cast<double>(q))));
        if (rule.order_per_axis == 0)
            throw std::invalid_argument("compute_c: rule has no declared exactness order");
        if (rule.order_per_axis < needed)
            throw std::invalid_argument(
                "compute_c: quadrature order " + std::to_string(rule.order_per_axis) +
                " too low for q=" + std::to_string(q) + " (need >= " + std::to_string(needed) +
                " per axis)");
    }
    Matrix gram = feature_gram(basis, rule);
    auto evals = sym_eigenvalues(gram);
    return evals.front();
}

double hessian_condition_features(const MatrixField& Q, const FeatureMap& features, int q, int d,
                                  const QuadratureRule& rule) {
    if (q < 1 || d < 1) throw std::invalid_argument("hessian_condition_features: bad q or d");
    const int p = q * d;
    if (p > 400)
        throw std::invalid_argument("hessian_condition_features: p too large for dense eigensolve");
    Matrix M(p, p);
    Matrix Qk(d, d);
    std::vector<double> feats(static_cast<std::size_t>(q));
    for (std::size_t k = 0; k < rule.size(); ++k) {
        std::span<const double> lam(rule.nodes[k]);
        features(lam, feats);
        Q(lam, Qk);
        const double w = rule.weights[k];
        // M[(i,a),(j,b)] += w * Q_ij * psi_a * psi_b with block-major index i*q+a.
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double wq = w * Qk(i, j);
                if (wq == 0.0) continue;
                for (int a = 0; a < q; ++a)
                    for (int b = 0; b < q; ++b)
                        M(i * q + a, j * q + b) += wq * feats[static_cast<std::size_t>(a)] *
                                                   feats[static_cast<std::size_t>(b)];
            }
    }
    auto evals = sym_eigenvalues(M);
    const double lo = evals.front(), hi = evals.back();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

double hessian_condition_quadratic(const MatrixField& Q, const Basis& basis,
                                   const QuadratureRule& rule) {
    FeatureMap fm = [&basis](std::span<const double> lam, std::span<double> out) {
        basis.eval_features(lam, out);
    };
    return hessian_condition_features(Q, fm, basis.q(), basis.d(), rule);
}

SpectralReport spectral_report(const Basis& basis, const LambdaDistribution& dist, int quad_order,
                               int grid_per_axis) {
    SpectralReport rep;
    rep.q = basis.q();
    rep.d = basis.d();
    auto grid = default_C_grid(basis, grid_per_axis);
    rep.grid_points = grid.size();
    rep.C = compute_C(basis, grid);
    rep.quad_order = quad_order;
    if (dist.dim() > 2) {
        // Sampled Gram estimate; quad_order doubles as the sample count.
        rep.c = compute_c(basis, sample_rule(dist, quad_order, 20251));
    } else {
        rep.c = compute_c(basis, dist.quadrature(quad_order));
    }
    rep.ratio = rep.c > 0.0 ? rep.C / rep.c : std::numeric_limits<double>::infinity();
    return rep;
}

}  // namespace solpath
