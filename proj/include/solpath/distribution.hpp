#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solpath/rng.hpp"

// Hyperparameter distributions P_lambda: sampling for the stochastic
// optimizer and Gaussian quadrature for deterministic expectations.  All
// quadrature weights are normalized to sum to one, so rules integrate against
// the probability measure itself (expectation convention).

namespace solpath {

enum class DistKind { uniform_box, beta, tensor_uniform_2d };

struct QuadratureRule {
    std::vector<std::vector<double>> nodes;  // n x dim
    std::vector<double> weights;             // n, sums to 1
    int order_per_axis = 0;

    int dim() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().size()); }
    std::size_t size() const { return nodes.size(); }
};

class LambdaDistribution {
  public:
    static LambdaDistribution uniform_box(std::vector<double> lo, std::vector<double> hi);
    static LambdaDistribution beta(double alpha, double beta);  // on [0, 1]
    static LambdaDistribution tensor_uniform_2d(std::vector<double> lo, std::vector<double> hi);

    DistKind kind() const { return kind_; }
    int dim() const { return static_cast<int>(lo_.size()); }
    const std::vector<double>& lower() const { return lo_; }
    const std::vector<double>& upper() const { return hi_; }
    double beta_alpha() const { return alpha_; }
    double beta_beta() const { return beta_; }

    void sample(Rng& rng, std::span<double> out) const;
    std::vector<double> sample(Rng& rng) const;

    // Gauss rule with `order` nodes per axis, exact for polynomial integrands
    // of per-axis degree <= 2*order - 1 under this distribution.
    QuadratureRule quadrature(int order) const;

  private:
    DistKind kind_ = DistKind::uniform_box;
    std::vector<double> lo_, hi_;
    double alpha_ = 1.0, beta_ = 1.0;
};

// Gauss-Legendre nodes/weights on [-1, 1], probability convention (weights
// sum to 1 against the uniform measure).  Nodes found by Newton iteration on
// the Legendre recurrence from cosine initial guesses.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Gauss-Jacobi nodes/weights for weight (1-x)^a (1+x)^b on [-1, 1], weights
// normalized to sum to 1 (i.e. quadrature for the matching Beta law).
void gauss_jacobi(int order, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights);

// Fixed Monte Carlo point set dressed as a rule with uniform weights 1/n;
// used where tensor quadrature is unavailable (high-dimensional lambda).
QuadratureRule sample_rule(const LambdaDistribution& dist, int n, std::uint64_t seed);

void quadrature_to_csv(const QuadratureRule& rule, const std::string& path);

// E[f(lambda)] under the rule.  Non-finite integrand values abort with the
// offending node spelled out rather than propagating NaNs.
template <class F>
double expect(const QuadratureRule& rule, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = f(std::span<const double>(rule.nodes[i]));
        if (!std::isfinite(v)) {
            std::string where = "(";
            for (std::size_t k = 0; k < rule.nodes[i].size(); ++k)
                where += (k ? "," : "") + std::to_string(rule.nodes[i][k]);
            where += ")";
            throw std::runtime_error("expect: integrand not finite at node " + std::to_string(i) +
                                     " " + where);
        }
        s += rule.weights[i] * v;
    }
    return s;
}

}  // namespace solpath
