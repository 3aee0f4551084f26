#include "solpath/basis.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace solpath {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool is_perfect_square(int q, int& root) {
    root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(q))));
    return root * root == q;
}

}  // namespace

std::string to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::legendre: return "legendre";
        case BasisKind::shifted_legendre: return "shifted_legendre";
        case BasisKind::shifted_jacobi: return "shifted_jacobi";
        case BasisKind::tensor_legendre_2d: return "tensor_legendre_2d";
        case BasisKind::monomial: return "monomial";
        case BasisKind::portfolio_custom_12d: return "portfolio_custom_12d";
    }
    return "unknown";
}

void legendre_all(int n, double x, double* out) {
    if (n <= 0) return;
    out[0] = 1.0;
    if (n == 1) return;
    out[1] = x;
    for (int k = 2; k < n; ++k)
        out[k] = ((2.0 * k - 1.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
}

void jacobi_all(int n, double a, double b, double x, double* out) {
    if (n <= 0) return;
    out[0] = 1.0;
    if (n == 1) return;
    out[1] = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for (int k = 2; k < n; ++k) {
        const double c1 = 2.0 * k * (k + a + b) * (2.0 * k + a + b - 2.0);
        const double c2 = (2.0 * k + a + b - 1.0) * (a * a - b * b);
        const double c3 = (2.0 * k + a + b - 1.0) * (2.0 * k + a + b) * (2.0 * k + a + b - 2.0);
        const double c4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + a + b);
        out[k] = ((c2 + c3 * x) * out[k - 1] - c4 * out[k - 2]) / c1;
    }
}

Basis Basis::legendre(int q, int d) {
    Basis s;
    s.kind_ = BasisKind::legendre;
    s.q_ = q;
    s.d_ = d;
    s.lo_ = {-1.0};
    s.hi_ = {1.0};
    s.finalize();
    return s;
}

Basis Basis::shifted_legendre(int q, int d, double lo, double hi) {
    Basis s;
    s.kind_ = BasisKind::shifted_legendre;
    s.q_ = q;
    s.d_ = d;
    s.lo_ = {lo};
    s.hi_ = {hi};
    s.finalize();
    return s;
}

Basis Basis::shifted_jacobi(int q, int d, double a, double b, double lo, double hi) {
    Basis s;
    s.kind_ = BasisKind::shifted_jacobi;
    s.q_ = q;
    s.d_ = d;
    s.lo_ = {lo};
    s.hi_ = {hi};
    s.jacobi_a_ = a;
    s.jacobi_b_ = b;
    s.finalize();
    return s;
}

Basis Basis::tensor_legendre_2d(int q, int d, std::vector<double> lo, std::vector<double> hi) {
    Basis s;
    s.kind_ = BasisKind::tensor_legendre_2d;
    s.q_ = q;
    s.d_ = d;
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    s.finalize();
    return s;
}

Basis Basis::monomial(int q, int d, double lo, double hi) {
    Basis s;
    s.kind_ = BasisKind::monomial;
    s.q_ = q;
    s.d_ = d;
    s.lo_ = {lo};
    s.hi_ = {hi};
    s.finalize();
    return s;
}

Basis Basis::portfolio_custom_12d(int q, int d, std::vector<double> lo, std::vector<double> hi) {
    Basis s;
    s.kind_ = BasisKind::portfolio_custom_12d;
    s.q_ = q;
    s.d_ = d;
    if (lo.empty()) {
        lo.assign(12, 0.0);
        hi.assign(12, 1.0);
        lo[1] = 0.2;  // risk-aversion coordinate lambda_2 lives in [0.2, 1]
    }
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    s.finalize();
    return s;
}

void Basis::finalize() {
    if (q_ <= 0) throw std::invalid_argument("Basis: q must be positive");
    if (d_ <= 0) throw std::invalid_argument("Basis: d must be positive");
    if (q_ > 100) throw std::invalid_argument("Basis: q > 100 unsupported");
    if (lo_.size() != hi_.size()) throw std::invalid_argument("Basis: domain bounds mismatch");
    for (std::size_t k = 0; k < lo_.size(); ++k)
        if (!(lo_[k] < hi_[k]))
            throw std::invalid_argument("Basis: empty domain on axis " + std::to_string(k));
    switch (kind_) {
        case BasisKind::tensor_legendre_2d: {
            if (lo_.size() != 2)
                throw std::invalid_argument("tensor_legendre_2d: lambda dimension must be 2");
            int r = 0;
            if (q_ > 0 && !is_perfect_square(q_, r))
                throw std::invalid_argument("tensor_legendre_2d: q must be a perfect square");
            break;
        }
        case BasisKind::portfolio_custom_12d:
            if (lo_.size() != 12)
                throw std::invalid_argument("portfolio_custom_12d: lambda dimension must be 12");
            break;
        default:
            if (lo_.size() != 1)
                throw std::invalid_argument(to_string(kind_) + ": lambda dimension must be 1");
    }
    id_ = to_string(kind_) + "(q=" + std::to_string(q_) + ",d=" + std::to_string(d_);
    if (kind_ == BasisKind::shifted_jacobi)
        id_ += ",a=" + fmt_double(jacobi_a_) + ",b=" + fmt_double(jacobi_b_);
    id_ += ",dom=";
    for (std::size_t k = 0; k < lo_.size(); ++k)
        id_ += "[" + fmt_double(lo_[k]) + "," + fmt_double(hi_[k]) + "]";
    id_ += ")";
}

void Basis::eval_features_unchecked(const double* lambda, double* out) const {
    switch (kind_) {
        case BasisKind::legendre:
            legendre_all(q_, lambda[0], out);
            break;
        case BasisKind::shifted_legendre: {
            const double x = 2.0 * (lambda[0] - lo_[0]) / (hi_[0] - lo_[0]) - 1.0;
            legendre_all(q_, x, out);
            break;
        }
        case BasisKind::shifted_jacobi: {
            const double x = 2.0 * (lambda[0] - lo_[0]) / (hi_[0] - lo_[0]) - 1.0;
            jacobi_all(q_, jacobi_a_, jacobi_b_, x, out);
            break;
        }
        case BasisKind::tensor_legendre_2d: {
            int r = 0;
            is_perfect_square(q_, r);
            double p1[16], p2[16];
            const double x1 = 2.0 * (lambda[0] - lo_[0]) / (hi_[0] - lo_[0]) - 1.0;
            const double x2 = 2.0 * (lambda[1] - lo_[1]) / (hi_[1] - lo_[1]) - 1.0;
            legendre_all(r, x1, p1);
            legendre_all(r, x2, p2);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) out[i * r + j] = p1[i] * p2[j];
            break;
        }
        case BasisKind::monomial: {
            double v = 1.0;
            for (int k = 0; k < q_; ++k) {
                out[k] = v;
                v *= lambda[0];
            }
            break;
        }
        case BasisKind::portfolio_custom_12d: {
            const double l2 = lambda[1];
            double pw = 1.0;  // lambda_2 power for the current tier of 12
            for (int j = 1; j <= q_; ++j) {
                if (j > 1 && (j - 1) % 12 == 0) pw *= l2;  // entering a new tier
                out[j - 1] = lambda[(j - 1) % 12] * pw;
            }
            break;
        }
    }
}

void Basis::eval_features(std::span<const double> lambda, std::span<double> out) const {
    if (static_cast<int>(lambda.size()) != lambda_dim())
        throw std::invalid_argument("Basis::eval_features: lambda has dimension " +
                                    std::to_string(lambda.size()) + ", expected " +
                                    std::to_string(lambda_dim()));
    if (static_cast<int>(out.size()) != q_)
        throw std::invalid_argument("Basis::eval_features: output span must have q entries");
    for (std::size_t k = 0; k < lo_.size(); ++k) {
        const double slack = 1e-9 * std::max(1.0, hi_[k] - lo_[k]);
        if (lambda[k] < lo_[k] - slack || lambda[k] > hi_[k] + slack)
            throw std::domain_error("Basis::eval_features: lambda[" + std::to_string(k) + "]=" +
                                    fmt_double(lambda[k]) + " outside domain [" +
                                    fmt_double(lo_[k]) + "," + fmt_double(hi_[k]) + "]");
    }
    eval_features_unchecked(lambda.data(), out.data());
}

std::vector<double> Basis::eval_features(std::span<const double> lambda) const {
    std::vector<double> out(q_);
    eval_features(lambda, std::span<double>(out));
    return out;
}

void Basis::apply_features(std::span<const double> features, std::span<const double> beta_values,
                           std::span<double> theta) const {
    for (int i = 0; i < d_; ++i) {
        const double* b = beta_values.data() + static_cast<std::size_t>(i) * q_;
        double s = 0.0;
        for (int j = 0; j < q_; ++j) s += features[j] * b[j];
        theta[i] = s;
    }
}

void Basis::pullback_features(std::span<const double> features, std::span<const double> grad_theta,
                              std::span<double> out) const {
    for (int i = 0; i < d_; ++i) {
        double* o = out.data() + static_cast<std::size_t>(i) * q_;
        const double g = grad_theta[i];
        for (int j = 0; j < q_; ++j) o[j] = features[j] * g;
    }
}

void Basis::apply(const Coefficients& beta, std::span<const double> lambda,
                  std::span<double> theta) const {
    if (beta.basis_id != id_)
        throw std::invalid_argument("Basis::apply: coefficients bound to \"" + beta.basis_id +
                                    "\" used with \"" + id_ + "\"");
    if (static_cast<int>(beta.values.size()) != p())
        throw std::invalid_argument("Basis::apply: coefficient vector has wrong length");
    if (static_cast<int>(theta.size()) != d_)
        throw std::invalid_argument("Basis::apply: theta span must have d entries");
    std::vector<double> feats(q_);
    eval_features(lambda, std::span<double>(feats));
    apply_features(feats, beta.values, theta);
}

std::vector<double> Basis::apply(const Coefficients& beta, std::span<const double> lambda) const {
    std::vector<double> theta(d_);
    apply(beta, lambda, std::span<double>(theta));
    return theta;
}

std::vector<double> Basis::pullback(std::span<const double> grad_theta,
                                    std::span<const double> lambda) const {
    if (static_cast<int>(grad_theta.size()) != d_)
        throw std::invalid_argument("Basis::pullback: gradient must have d entries");
    std::vector<double> feats(q_);
    eval_features(lambda, std::span<double>(feats));
    std::vector<double> out(p());
    pullback_features(feats, grad_theta, out);
    return out;
}

Basis Basis::extend() const {
    Basis s = *this;
    if (kind_ == BasisKind::tensor_legendre_2d) {
        int r = 0;
        is_perfect_square(q_, r);
        s.q_ = (r + 1) * (r + 1);
    } else {
        s.q_ = q_ + 1;
    }
    s.finalize();
    return s;
}

std::vector<int> Basis::extension_index_map() const {
    std::vector<int> map(q_);
    if (kind_ == BasisKind::tensor_legendre_2d) {
        int r = 0;
        is_perfect_square(q_, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) map[i * r + j] = i * (r + 1) + j;
    } else {
        for (int j = 0; j < q_; ++j) map[j] = j;
    }
    return map;
}

}  // namespace solpath
