#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "solpath/linalg.hpp"

// Parametric problem families h(theta, lambda): each instance is smooth and
// strongly convex in theta uniformly over its lambda domain, and reports
// certified strong-convexity / smoothness constants (mu, L) for that domain.

namespace solpath {

struct ParametricProblem {
    std::string name;
    int dim_theta = 0;
    int dim_lambda = 0;
    double mu = 0.0;  // strong convexity over the lambda domain
    double L = 0.0;   // gradient Lipschitz constant over the lambda domain
    // Returns h(theta, lambda) and writes the gradient in theta.
    std::function<double(std::span<const double> theta, std::span<const double> lambda,
                         std::span<double> grad)>
        value_grad;

    double value(std::span<const double> theta, std::span<const double> lambda) const {
        std::vector<double> g(dim_theta);
        return value_grad(theta, lambda, std::span<double>(g));
    }
    std::vector<double> gradient(std::span<const double> theta,
                                 std::span<const double> lambda) const {
        std::vector<double> g(dim_theta);
        value_grad(theta, lambda, std::span<double>(g));
        return g;
    }
};

struct ClassificationData {
    Matrix x;                // n x d feature matrix
    std::vector<int> y;      // labels in {0, 1}
    int positives() const;
    int negatives() const;
};

struct MarketModel {
    std::vector<double> mean;  // expected returns, d entries
    Matrix cov;                // d x d PSD covariance
    int d() const { return static_cast<int>(mean.size()); }
};

// h = 0.5 ||theta - g(lambda)||^2 on lambda in [-1, 1]; mu = L = 1.
ParametricProblem quadratic_toy(std::function<void(std::span<const double>, std::span<double>)> g,
                                int dim_theta, int dim_lambda = 1);

// Named 1-D toy paths: "identity" (lambda), "cubic" (lambda^3),
// "quintic" (lambda^5), "abs_cubed" (|lambda|^3).
ParametricProblem quadratic_toy_path(const std::string& path_name);
// The path function itself, for ground-truth checks.
double toy_path_value(const std::string& path_name, double lambda);

// Class-reweighted logistic regression with ridge term:
//   h = (1 - lambda) * l_pos + lambda * l_neg + ridge * ||theta||^2,
// where l_c averages log(1 + exp((-2 y_i + 1) x_i' theta)) over class c.
// lambda in [0, 1]; mu = 2 * ridge; L = 2 * ridge + max_c sigma_max(X_c' X_c) / (4 n_c).
ParametricProblem weighted_logistic(const ClassificationData& data, double ridge = 0.125);

// Smoothed sparse mean-variance portfolio over lambda = (trade-off, risk-aversion):
//   h = -lambda_1 mean' theta + lambda_2 theta' cov theta + sum_i (sqrt(theta_i^2 + eps^2) - eps)
// with eps = 0.01; lambda_1 in [0, 1], lambda_2 in [lam2_lo, lam2_hi].
ParametricProblem portfolio_2d(const MarketModel& market, double lam2_lo = 0.2,
                               double lam2_hi = 1.0);

// Target-tracking portfolio over 12 hyperparameters (trade-off, risk-aversion,
// and a 10-dim tracking target w = lambda_3..lambda_12):
//   h = -lambda_1 mean' theta + lambda_2 theta' cov theta + ||theta - w||^2.
ParametricProblem portfolio_12d(const MarketModel& market, double lam2_lo = 0.2,
                                double lam2_hi = 1.0);

// Closed-form minimizer of portfolio_12d:
//   theta*(lambda) = 0.5 (I + lambda_2 cov)^{-1} (lambda_1 mean + 2 w).
void analytic_path_12d(const MarketModel& market, std::span<const double> lambda,
                       std::span<double> theta);

// CSV ingestion.  Classification files: one row per case, label column first
// (0/1), features after.  Returns files: one row per period, one column per
// asset; mean and unbiased sample covariance are computed and the covariance
// validated PSD.  Parse errors report the offending line.
ClassificationData ingest_classification_csv(const std::string& path, bool standardize = false,
                                             bool intercept = false);
MarketModel ingest_returns_csv(const std::string& path);

// Synthetic generators (deterministic in the seed).
ClassificationData synth_classification(std::uint64_t seed, int n, int d,
                                        double imbalance = 0.044, bool standardize = false,
                                        bool intercept = false);
MarketModel synth_market(std::uint64_t seed, int d, double eig_lo = 0.5, double eig_hi = 1.5,
                         double mean_scale = 0.1);

}  // namespace solpath
