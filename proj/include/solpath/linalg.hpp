#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Small dense linear algebra for the modest sizes this library needs
// (theta dimension <= ~50, basis sizes <= ~100, Gram matrices <= ~400).
// Row-major storage throughout.

namespace solpath {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {a.data() + i * cols, cols}; }
};

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline void matvec(const Matrix& m, std::span<const double> x, std::span<double> out) {
    if (x.size() != m.cols || out.size() != m.rows)
        throw std::invalid_argument("matvec: dimension mismatch");
    for (std::size_t i = 0; i < m.rows; ++i) out[i] = dot(m.row(i), x);
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.  Sweeps until
// the largest off-diagonal magnitude falls below `tol`; plenty for the Gram
// and covariance matrices handled here (n <= ~400).
inline std::vector<double> sym_eigenvalues(Matrix m, double tol = 1e-13, int max_sweeps = 100) {
    if (m.rows != m.cols) throw std::invalid_argument("sym_eigenvalues: matrix not square");
    const std::size_t n = m.rows;
    if (n == 0) return {};
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(m(i, j)));
    if (scale == 0.0) return std::vector<double>(n, 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(m(p, q)));
        if (off <= tol * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Cholesky factorization of a symmetric positive definite matrix (lower factor).
inline Matrix cholesky(const Matrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = m.rows;
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0.0)
                    throw std::runtime_error("cholesky: matrix not positive definite (pivot " +
                                             std::to_string(i) + ")");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

// Solves m x = b for SPD m via Cholesky.
inline std::vector<double> spd_solve(const Matrix& m, std::span<const double> b) {
    const Matrix l = cholesky(m);
    const std::size_t n = m.rows;
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

}  // namespace solpath
