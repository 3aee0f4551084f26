#pragma once

#include <functional>
#include <vector>

#include "solpath/basis.hpp"
#include "solpath/distribution.hpp"
#include "solpath/linalg.hpp"

// Spectral constants of the feature map:
//   C = sup_lambda sigma_max(Phi(lambda)' Phi(lambda))
//   c = sigma_min( E[Phi(lambda)' Phi(lambda)] )
// Because Phi is block diagonal with d identical 1 x q rows, Phi'Phi is a sum
// of rank-one blocks and sigma_max(Phi'Phi) = ||psi(lambda)||^2, so C reduces
// to a scalar maximization; c is the smallest eigenvalue of the q x q feature
// Gram under the lambda distribution.

namespace solpath {

struct SpectralReport {
    double C = 0.0;
    double c = 0.0;
    double ratio = 0.0;  // C / c
    int q = 0;
    int d = 0;
    std::size_t grid_points = 0;
    int quad_order = 0;
};

// Max of ||psi(lambda)||^2 over the given candidate points.
double compute_C(const Basis& basis, const std::vector<std::vector<double>>& grid);

// Default search grid: a dense per-axis grid (including endpoints) tensored up
// to 2 lambda dimensions, always augmented with the domain corners; above 2
// dimensions, the corners plus the center (the feature families used there
// attain their maxima at corners).
std::vector<std::vector<double>> default_C_grid(const Basis& basis, int per_axis = 4096);

// q x q Gram E[psi psi'] under the rule.
Matrix feature_gram(const Basis& basis, const QuadratureRule& rule);

// Smallest Gram eigenvalue.  Requires a rule exact for the Gram's polynomial
// entries: order >= q per axis (>= sqrt(q) for the 2-D tensor family).  The
// 12-d family instead takes a Monte Carlo rule and returns an estimate.
double compute_c(const Basis& basis, const QuadratureRule& rule);

// Condition number of E[Phi' Q(lambda) Phi] for a PSD matrix field Q; the
// general form takes an arbitrary feature map so callers can pre-transform
// features (e.g. orthonormalize under the Q-inner product).
using MatrixField = std::function<void(std::span<const double> lambda, Matrix& out)>;
using FeatureMap = std::function<void(std::span<const double> lambda, std::span<double> out)>;

double hessian_condition_features(const MatrixField& Q, const FeatureMap& features, int q, int d,
                                  const QuadratureRule& rule);
double hessian_condition_quadratic(const MatrixField& Q, const Basis& basis,
                                   const QuadratureRule& rule);

// For distributions over more than two lambda dimensions, quad_order is the
// Monte Carlo sample count for the Gram estimate instead of a tensor order.
SpectralReport spectral_report(const Basis& basis, const LambdaDistribution& dist, int quad_order,
                               int grid_per_axis = 4096);

}  // namespace solpath
