#include "solpath/distribution.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "solpath/basis.hpp"

namespace solpath {

namespace {

double jacobi_value(int n, double a, double b, double x) {
    std::vector<double> p(n + 1);
    jacobi_all(n + 1, a, b, x, p.data());
    return p[n];
}

// d/dx P_n^{(a,b)}(x) = (n+a+b+1)/2 * P_{n-1}^{(a+1,b+1)}(x)
double jacobi_derivative(int n, double a, double b, double x) {
    if (n == 0) return 0.0;
    return 0.5 * (n + a + b + 1.0) * jacobi_value(n - 1, a + 1.0, b + 1.0, x);
}

}  // namespace

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1 || order > 256)
        throw std::invalid_argument("gauss_legendre: order must be in [1, 256]");
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    std::vector<double> p(order + 1);
    for (int k = 0; k < order; ++k) {
        // Standard cosine initial guess for the k-th root (descending order).
        double x = std::cos(M_PI * (k + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre_all(order + 1, x, p.data());
            // (1-x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x))
            dp = order * (p[order - 1] - x * p[order]) / (1.0 - x * x);
            const double dx = p[order] / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        legendre_all(order + 1, x, p.data());
        dp = order * (p[order - 1] - x * p[order]) / (1.0 - x * x);
        nodes[k] = x;
        // Probability convention: classical weight 2/((1-x^2) P_n'^2) halved.
        weights[k] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    std::sort(nodes.begin(), nodes.end());
    // Recompute weights in sorted node order.
    for (int k = 0; k < order; ++k) {
        const double x = nodes[k];
        legendre_all(order + 1, x, p.data());
        const double dp = order * (p[order - 1] - x * p[order]) / (1.0 - x * x);
        weights[k] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

void gauss_jacobi(int order, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights) {
    if (order < 1 || order > 256)
        throw std::invalid_argument("gauss_jacobi: order must be in [1, 256]");
    if (a <= -1.0 || b <= -1.0)
        throw std::invalid_argument("gauss_jacobi: parameters must exceed -1");
    nodes.clear();
    // Roots located by a sign-change scan plus bisection: robust for the
    // skewed parameter ranges used here, and cheap at the orders involved.
    const int scan = std::max(2000, 40 * order);
    double prev_x = -1.0 + 1e-12;
    double prev_v = jacobi_value(order, a, b, prev_x);
    for (int i = 1; i <= scan; ++i) {
        const double x = -1.0 + (2.0 - 2e-12) * i / scan;
        const double v = jacobi_value(order, a, b, x);
        if (prev_v == 0.0) {
            nodes.push_back(prev_x);
        } else if (prev_v * v < 0.0) {
            double lo = prev_x, hi = x, flo = prev_v;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = jacobi_value(order, a, b, mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if (hi - lo < 1e-15) break;
            }
            double root = 0.5 * (lo + hi);
            // Newton polish.
            for (int it = 0; it < 8; ++it) {
                const double f = jacobi_value(order, a, b, root);
                const double df = jacobi_derivative(order, a, b, root);
                if (df == 0.0) break;
                const double dx = f / df;
                root -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            nodes.push_back(root);
        }
        prev_x = x;
        prev_v = v;
    }
    if (static_cast<int>(nodes.size()) != order)
        throw std::runtime_error("gauss_jacobi: expected " + std::to_string(order) +
                                 " roots, found " + std::to_string(nodes.size()));
    // Relative weights 1 / (P_n' * P_{n+1}); the Gauss-Jacobi constant cancels
    // when normalizing to a probability rule.
    weights.assign(order, 0.0);
    double total = 0.0;
    for (int k = 0; k < order; ++k) {
        const double w =
            1.0 / (jacobi_derivative(order, a, b, nodes[k]) * jacobi_value(order + 1, a, b, nodes[k]));
        weights[k] = w;
        total += w;
    }
    for (double& w : weights) w /= total;
}

LambdaDistribution LambdaDistribution::uniform_box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size())
        throw std::invalid_argument("uniform_box: bounds must be non-empty and equal length");
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (!(lo[k] < hi[k]))
            throw std::invalid_argument("uniform_box: empty support on axis " + std::to_string(k));
    LambdaDistribution d;
    d.kind_ = DistKind::uniform_box;
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    return d;
}

LambdaDistribution LambdaDistribution::beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("beta: shape parameters must be positive");
    LambdaDistribution d;
    d.kind_ = DistKind::beta;
    d.lo_ = {0.0};
    d.hi_ = {1.0};
    d.alpha_ = alpha;
    d.beta_ = beta;
    return d;
}

LambdaDistribution LambdaDistribution::tensor_uniform_2d(std::vector<double> lo,
                                                         std::vector<double> hi) {
    if (lo.size() != 2 || hi.size() != 2)
        throw std::invalid_argument("tensor_uniform_2d: bounds must have 2 entries");
    LambdaDistribution d = uniform_box(std::move(lo), std::move(hi));
    d.kind_ = DistKind::tensor_uniform_2d;
    return d;
}

void LambdaDistribution::sample(Rng& rng, std::span<double> out) const {
    if (static_cast<int>(out.size()) != dim())
        throw std::invalid_argument("LambdaDistribution::sample: wrong output size");
    switch (kind_) {
        case DistKind::beta:
            out[0] = rng.beta(alpha_, beta_);
            break;
        case DistKind::uniform_box:
        case DistKind::tensor_uniform_2d:
            for (int k = 0; k < dim(); ++k) out[k] = rng.uniform(lo_[k], hi_[k]);
            break;
    }
}

std::vector<double> LambdaDistribution::sample(Rng& rng) const {
    std::vector<double> out(dim());
    sample(rng, std::span<double>(out));
    return out;
}

QuadratureRule LambdaDistribution::quadrature(int order) const {
    QuadratureRule rule;
    rule.order_per_axis = order;
    if (kind_ == DistKind::beta) {
        // Beta(alpha, beta) on [0,1] pairs with Jacobi (a, b) = (beta-1, alpha-1):
        // mapping x -> (1+x)/2 turns (1-x)^a (1+x)^b into (1-l)^(beta-1) l^(alpha-1).
        std::vector<double> x, w;
        gauss_jacobi(order, beta_ - 1.0, alpha_ - 1.0, x, w);
        rule.nodes.reserve(order);
        for (int k = 0; k < order; ++k) rule.nodes.push_back({0.5 * (1.0 + x[k])});
        rule.weights = std::move(w);
        return rule;
    }
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    const int nd = dim();
    std::vector<int> idx(nd, 0);
    const std::size_t total = [&] {
        std::size_t t = 1;
        for (int k = 0; k < nd; ++k) t *= static_cast<std::size_t>(order);
        return t;
    }();
    rule.nodes.reserve(total);
    rule.weights.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<double> node(nd);
        double weight = 1.0;
        for (int k = 0; k < nd; ++k) {
            node[k] = lo_[k] + 0.5 * (x[idx[k]] + 1.0) * (hi_[k] - lo_[k]);
            weight *= w[idx[k]];
        }
        rule.nodes.push_back(std::move(node));
        rule.weights.push_back(weight);
        for (int k = nd - 1; k >= 0; --k) {
            if (++idx[k] < order) break;
            idx[k] = 0;
        }
    }
    return rule;
}

QuadratureRule sample_rule(const LambdaDistribution& dist, int n, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("sample_rule: n must be positive");
    Rng rng(seed);
    QuadratureRule rule;
    rule.order_per_axis = 0;
    rule.nodes.reserve(n);
    rule.weights.assign(n, 1.0 / n);
    for (int i = 0; i < n; ++i) rule.nodes.push_back(dist.sample(rng));
    return rule;
}

void quadrature_to_csv(const QuadratureRule& rule, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("quadrature_to_csv: cannot open " + path);
    for (int k = 0; k < rule.dim(); ++k) out << "node_" << k << ",";
    out << "weight\n";
    char buf[40];
    for (std::size_t i = 0; i < rule.size(); ++i) {
        for (double v : rule.nodes[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", rule.weights[i]);
        out << buf << "\n";
    }
}

}  // namespace solpath
