#pragma once

#include <span>
#include <string>
#include <vector>

// Linear basis expansions theta_hat(lambda) = Phi(lambda) * beta used to
// represent candidate solution paths.  Phi(lambda) is block diagonal: every
// output coordinate theta_i shares the same q scalar features psi(lambda), so
// Phi never needs to be materialized; apply/pullback run in O(q*d).
//
// Coefficients are stored block-major: beta[i*q + j] multiplies feature j of
// output coordinate i.

namespace solpath {

enum class BasisKind {
    legendre,             // P_0..P_{q-1} on [-1, 1]
    shifted_legendre,     // Legendre affinely mapped to [lo, hi]
    shifted_jacobi,       // Jacobi(a, b) polynomials mapped to [lo, hi]
    tensor_legendre_2d,   // P_i(x1) P_j(x2) over a 2-D box, q a perfect square
    monomial,             // 1, x, x^2, ... on [lo, hi]
    portfolio_custom_12d  // lambda_((j-1) mod 12 + 1) * lambda_2^floor((j-1)/12), j = 1..q
};

std::string to_string(BasisKind kind);

struct Coefficients {
    std::string basis_id;
    std::vector<double> values;  // length p = q * d, block-major
};

class Basis {
  public:
    static Basis legendre(int q, int d);
    static Basis shifted_legendre(int q, int d, double lo, double hi);
    static Basis shifted_jacobi(int q, int d, double a, double b, double lo = 0.0,
                                double hi = 1.0);
    static Basis tensor_legendre_2d(int q, int d, std::vector<double> lo, std::vector<double> hi);
    static Basis monomial(int q, int d, double lo = -1.0, double hi = 1.0);
    static Basis portfolio_custom_12d(int q, int d, std::vector<double> lo = {},
                                      std::vector<double> hi = {});

    BasisKind kind() const { return kind_; }
    int q() const { return q_; }
    int d() const { return d_; }
    int p() const { return q_ * d_; }
    int lambda_dim() const { return static_cast<int>(lo_.size()); }
    const std::vector<double>& lower() const { return lo_; }
    const std::vector<double>& upper() const { return hi_; }
    double jacobi_a() const { return jacobi_a_; }
    double jacobi_b() const { return jacobi_b_; }

    // Stable identifier binding coefficient vectors to the basis that produced
    // them; apply/pullback reject coefficients minted by a different basis.
    const std::string& id() const { return id_; }

    Coefficients zeros() const { return Coefficients{id_, std::vector<double>(p(), 0.0)}; }

    // Writes the q features psi(lambda); validates dimension and domain.
    void eval_features(std::span<const double> lambda, std::span<double> out) const;
    std::vector<double> eval_features(std::span<const double> lambda) const;

    // theta = Phi(lambda) beta  (theta has d entries).
    void apply(const Coefficients& beta, std::span<const double> lambda,
               std::span<double> theta) const;
    std::vector<double> apply(const Coefficients& beta, std::span<const double> lambda) const;

    // Phi(lambda)^T g for g in R^d (the gradient pullback), p entries.
    std::vector<double> pullback(std::span<const double> grad_theta,
                                 std::span<const double> lambda) const;

    // Next basis in the nested family: one more degree (tensor: one more
    // degree per axis).  Existing features keep their identity; see
    // extension_index_map for where each old feature lands.
    Basis extend() const;

    // Position of old feature j inside extend()'s feature list.  The 1-D
    // families extend by appending, so the map is the identity prefix; the
    // 2-D tensor family reorders because features stay (i, j)-lexicographic.
    std::vector<int> extension_index_map() const;

    // Unchecked fast paths used by the optimizer inner loop.
    void eval_features_unchecked(const double* lambda, double* out) const;
    void apply_features(std::span<const double> features, std::span<const double> beta_values,
                        std::span<double> theta) const;
    void pullback_features(std::span<const double> features, std::span<const double> grad_theta,
                           std::span<double> out) const;

  private:
    Basis() = default;
    void finalize();  // computes id_, validates parameters

    BasisKind kind_ = BasisKind::legendre;
    int q_ = 0;
    int d_ = 0;
    std::vector<double> lo_, hi_;
    double jacobi_a_ = 0.0, jacobi_b_ = 0.0;
    std::string id_;
};

// Legendre P_0..P_{n-1} at x (three-term recurrence); exposed for reuse by
// quadrature construction and tests.
void legendre_all(int n, double x, double* out);

// Jacobi P_0^{(a,b)}..P_{n-1}^{(a,b)} at x.
void jacobi_all(int n, double a, double b, double x, double* out);

}  // namespace solpath
