#include "solpath/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "solpath/rng.hpp"

namespace solpath {

namespace {

constexpr double kSmoothL1Eps = 0.01;

// log(1 + exp(z)) without overflow.
double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<std::vector<double>> parse_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        // Skip a header row of non-numeric column names.
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        bool numeric = true;
        while (std::getline(ss, field, ',')) {
            const std::size_t a = field.find_first_not_of(" \t\r");
            if (a == std::string::npos) {
                numeric = false;
                break;
            }
            const std::size_t b = field.find_last_not_of(" \t\r");
            field = field.substr(a, b - a + 1);
            try {
                std::size_t used = 0;
                const double v = std::stod(field, &used);
                if (used != field.size()) throw std::invalid_argument(field);
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows.empty()) continue;  // header line
            throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                     ": non-numeric field");
        }
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw std::runtime_error(path + " line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(width) + " fields, got " +
                                     std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");
    return rows;
}

void standardize_columns(Matrix& x) {
    for (std::size_t j = 0; j < x.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) mean += x(i, j);
        mean /= static_cast<double>(x.rows);
        double var = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
        const double sd = x.rows > 1 ? std::sqrt(var / (x.rows - 1)) : 0.0;
        const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
        for (std::size_t i = 0; i < x.rows; ++i) x(i, j) = (x(i, j) - mean) * scale;
    }
}

Matrix append_intercept(const Matrix& x) {
    Matrix out(x.rows, x.cols + 1);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = 0; j < x.cols; ++j) out(i, j) = x(i, j);
        out(i, x.cols) = 1.0;
    }
    return out;
}

double sigma_max(const Matrix& sym) {
    const std::vector<double> ev = sym_eigenvalues(sym);
    return ev.empty() ? 0.0 : std::max(std::fabs(ev.front()), std::fabs(ev.back()));
}

}  // namespace

int ClassificationData::positives() const {
    return static_cast<int>(std::count(y.begin(), y.end(), 1));
}
int ClassificationData::negatives() const {
    return static_cast<int>(std::count(y.begin(), y.end(), 0));
}

ParametricProblem quadratic_toy(std::function<void(std::span<const double>, std::span<double>)> g,
                                int dim_theta, int dim_lambda) {
    ParametricProblem p;
    p.name = "quadratic_toy";
    p.dim_theta = dim_theta;
    p.dim_lambda = dim_lambda;
    p.mu = 1.0;
    p.L = 1.0;
    p.value_grad = [g = std::move(g), dim_theta](std::span<const double> theta,
                                                 std::span<const double> lambda,
                                                 std::span<double> grad) {
        std::vector<double> target(dim_theta);
        g(lambda, std::span<double>(target));
        double v = 0.0;
        for (int i = 0; i < dim_theta; ++i) {
            const double r = theta[i] - target[i];
            grad[i] = r;
            v += 0.5 * r * r;
        }
        return v;
    };
    return p;
}

double toy_path_value(const std::string& path_name, double lambda) {
    if (path_name == "identity") return lambda;
    if (path_name == "cubic") return lambda * lambda * lambda;
    if (path_name == "quintic") return std::pow(lambda, 5);
    if (path_name == "abs_cubed") return std::fabs(lambda * lambda * lambda);
    throw std::invalid_argument("unknown toy path \"" + path_name +
                                "\" (expected identity|cubic|quintic|abs_cubed)");
}

ParametricProblem quadratic_toy_path(const std::string& path_name) {
    toy_path_value(path_name, 0.0);  // validate the name eagerly
    ParametricProblem p = quadratic_toy(
        [path_name](std::span<const double> lambda, std::span<double> out) {
            out[0] = toy_path_value(path_name, lambda[0]);
        },
        1, 1);
    p.name = "quadratic_toy(" + path_name + ")";
    return p;
}

ParametricProblem weighted_logistic(const ClassificationData& data, double ridge) {
    if (data.x.rows != data.y.size())
        throw std::invalid_argument("weighted_logistic: feature/label count mismatch");
    if (data.positives() == 0 || data.negatives() == 0)
        throw std::invalid_argument("weighted_logistic: both classes must be present");
    if (!(ridge > 0.0)) throw std::invalid_argument("weighted_logistic: ridge must be positive");

    auto shared = std::make_shared<ClassificationData>(data);
    const int d = static_cast<int>(data.x.cols);

    // Per-class smoothness: sigma_max(X_c' X_c) / (4 n_c).
    double class_L = 0.0;
    for (int cls = 0; cls <= 1; ++cls) {
        Matrix gram(d, d);
        std::size_t n_cls = 0;
        for (std::size_t i = 0; i < shared->x.rows; ++i) {
            if (shared->y[i] != cls) continue;
            ++n_cls;
            for (int r = 0; r < d; ++r)
                for (int c = 0; c <= r; ++c) gram(r, c) += shared->x(i, r) * shared->x(i, c);
        }
        for (int r = 0; r < d; ++r)
            for (int c = r + 1; c < d; ++c) gram(r, c) = gram(c, r);
        class_L = std::max(class_L, sigma_max(gram) / (4.0 * static_cast<double>(n_cls)));
    }

    ParametricProblem p;
    p.name = "weighted_logistic";
    p.dim_theta = d;
    p.dim_lambda = 1;
    p.mu = 2.0 * ridge;
    p.L = 2.0 * ridge + class_L;
    p.value_grad = [shared, ridge, d](std::span<const double> theta,
                                      std::span<const double> lambda, std::span<double> grad) {
        const double lam = lambda[0];
        const double class_weight[2] = {lam, 1.0 - lam};  // indexed by label
        double v = 0.0;
        std::fill(grad.begin(), grad.end(), 0.0);
        const double n_cls[2] = {static_cast<double>(shared->negatives()),
                                 static_cast<double>(shared->positives())};
        for (std::size_t i = 0; i < shared->x.rows; ++i) {
            const int y = shared->y[i];
            const double s = -2.0 * y + 1.0;  // -1 for positives, +1 for negatives
            const double z = s * dot(shared->x.row(i), theta);
            const double scale = class_weight[y] / n_cls[y];
            v += scale * log1pexp(z);
            const double gz = scale * s * sigmoid(z);
            for (int j = 0; j < d; ++j) grad[j] += gz * shared->x(i, j);
        }
        for (int j = 0; j < d; ++j) {
            v += ridge * theta[j] * theta[j];
            grad[j] += 2.0 * ridge * theta[j];
        }
        return v;
    };
    return p;
}

ParametricProblem portfolio_2d(const MarketModel& market, double lam2_lo, double lam2_hi) {
    const int d = market.d();
    if (market.cov.rows != static_cast<std::size_t>(d) || market.cov.cols != static_cast<std::size_t>(d))
        throw std::invalid_argument("portfolio_2d: covariance shape mismatch");
    const std::vector<double> ev = sym_eigenvalues(market.cov);
    if (ev.front() <= 0.0)
        throw std::invalid_argument("portfolio_2d: covariance must be positive definite");
    auto shared = std::make_shared<MarketModel>(market);

    ParametricProblem p;
    p.name = "portfolio_2d";
    p.dim_theta = d;
    p.dim_lambda = 2;
    p.mu = 2.0 * lam2_lo * ev.front();
    p.L = 2.0 * lam2_hi * ev.back() + 1.0 / kSmoothL1Eps;
    p.value_grad = [shared, d](std::span<const double> theta, std::span<const double> lambda,
                               std::span<double> grad) {
        const double l1 = lambda[0], l2 = lambda[1];
        double v = 0.0;
        for (int i = 0; i < d; ++i) {
            const double si = dot(shared->cov.row(i), theta);
            grad[i] = -l1 * shared->mean[i] + 2.0 * l2 * si;
            v += -l1 * shared->mean[i] * theta[i] + l2 * theta[i] * si;
        }
        for (int i = 0; i < d; ++i) {
            const double root = std::sqrt(theta[i] * theta[i] + kSmoothL1Eps * kSmoothL1Eps);
            v += root - kSmoothL1Eps;
            grad[i] += theta[i] / root;
        }
        return v;
    };
    return p;
}

ParametricProblem portfolio_12d(const MarketModel& market, double lam2_lo, double lam2_hi) {
    const int d = market.d();
    if (d != 10)
        throw std::invalid_argument("portfolio_12d: market must have 10 assets (lambda_3..lambda_12 track theta)");
    const std::vector<double> ev = sym_eigenvalues(market.cov);
    if (ev.front() < 0.0)
        throw std::invalid_argument("portfolio_12d: covariance must be PSD");
    auto shared = std::make_shared<MarketModel>(market);

    ParametricProblem p;
    p.name = "portfolio_12d";
    p.dim_theta = d;
    p.dim_lambda = 12;
    p.mu = 2.0 + 2.0 * lam2_lo * ev.front();
    p.L = 2.0 + 2.0 * lam2_hi * ev.back();
    p.value_grad = [shared, d](std::span<const double> theta, std::span<const double> lambda,
                               std::span<double> grad) {
        const double l1 = lambda[0], l2 = lambda[1];
        double v = 0.0;
        for (int i = 0; i < d; ++i) {
            const double si = dot(shared->cov.row(i), theta);
            const double r = theta[i] - lambda[2 + i];
            grad[i] = -l1 * shared->mean[i] + 2.0 * l2 * si + 2.0 * r;
            v += -l1 * shared->mean[i] * theta[i] + l2 * theta[i] * si + r * r;
        }
        return v;
    };
    return p;
}

void analytic_path_12d(const MarketModel& market, std::span<const double> lambda,
                       std::span<double> theta) {
    const int d = market.d();
    if (static_cast<int>(lambda.size()) != 12)
        throw std::invalid_argument("analytic_path_12d: lambda must have 12 entries");
    if (static_cast<int>(theta.size()) != d)
        throw std::invalid_argument("analytic_path_12d: theta must have d entries");
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = lambda[1] * market.cov(i, j) + (i == j ? 1.0 : 0.0);
    std::vector<double> rhs(d);
    for (int i = 0; i < d; ++i) rhs[i] = 0.5 * lambda[0] * market.mean[i] + lambda[2 + i];
    const std::vector<double> sol = spd_solve(m, rhs);
    std::copy(sol.begin(), sol.end(), theta.begin());
}

ClassificationData ingest_classification_csv(const std::string& path, bool standardize,
                                             bool intercept) {
    const auto rows = parse_numeric_csv(path);
    if (rows.front().size() < 2)
        throw std::runtime_error(path + ": need a label column plus at least one feature");
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size() - 1;
    ClassificationData data;
    data.x = Matrix(n, d);
    data.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double label = rows[i][0];
        if (label != 0.0 && label != 1.0)
            throw std::runtime_error(path + ": label must be 0 or 1 (row " + std::to_string(i + 1) +
                                     ")");
        data.y[i] = static_cast<int>(label);
        for (std::size_t j = 0; j < d; ++j) data.x(i, j) = rows[i][j + 1];
    }
    if (standardize) standardize_columns(data.x);
    if (intercept) data.x = append_intercept(data.x);
    return data;
}

MarketModel ingest_returns_csv(const std::string& path) {
    const auto rows = parse_numeric_csv(path);
    if (rows.size() < 2)
        throw std::runtime_error(path + ": need at least 2 return periods for a covariance");
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    MarketModel m;
    m.mean.assign(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) m.mean[j] += r[j];
    for (double& v : m.mean) v /= static_cast<double>(n);
    m.cov = Matrix(d, d);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                m.cov(i, j) += (r[i] - m.mean[i]) * (r[j] - m.mean[j]);
    for (double& v : m.cov.a) v /= static_cast<double>(n - 1);
    const std::vector<double> ev = sym_eigenvalues(m.cov);
    const double scale = std::max(1.0, std::fabs(ev.back()));
    if (ev.front() < -1e-10 * scale)
        throw std::runtime_error(path + ": sample covariance not PSD (min eigenvalue " +
                                 std::to_string(ev.front()) + ")");
    return m;
}

ClassificationData synth_classification(std::uint64_t seed, int n, int d, double imbalance,
                                        bool standardize, bool intercept) {
    if (n < 2 || d < 1) throw std::invalid_argument("synth_classification: need n >= 2, d >= 1");
    if (!(imbalance > 0.0) || !(imbalance < 1.0))
        throw std::invalid_argument("synth_classification: imbalance must be in (0, 1)");
    Rng rng(seed);
    ClassificationData data;
    data.x = Matrix(n, d);
    for (double& v : data.x.a) v = rng.normal();
    std::vector<double> truth(d);
    for (double& v : truth) v = rng.normal() / std::sqrt(static_cast<double>(d));
    std::vector<double> score(n);
    for (int i = 0; i < n; ++i) score[i] = dot(data.x.row(i), truth);
    // Exact-count labeling: the highest-scoring fraction becomes the positive
    // minority class, so the split is reproducible (e.g. 956:44 at 0.044).
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return score[a] < score[b]; });
    const int k = std::max(1, static_cast<int>(std::lround(imbalance * n)));
    data.y.assign(n, 0);
    for (int i = 0; i < k; ++i) data.y[idx[n - 1 - i]] = 1;
    if (standardize) standardize_columns(data.x);
    if (intercept) data.x = append_intercept(data.x);
    return data;
}

MarketModel synth_market(std::uint64_t seed, int d, double eig_lo, double eig_hi,
                         double mean_scale) {
    if (d < 1) throw std::invalid_argument("synth_market: d must be positive");
    if (!(eig_lo > 0.0) || !(eig_hi >= eig_lo))
        throw std::invalid_argument("synth_market: need 0 < eig_lo <= eig_hi");
    Rng rng(seed);
    // Random orthogonal frame via Gram-Schmidt on a Gaussian matrix.
    Matrix v(d, d);
    for (double& x : v.a) x = rng.normal();
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < i; ++k) {
            const double proj = dot(v.row(i), v.row(k));
            for (int j = 0; j < d; ++j) v(i, j) -= proj * v(k, j);
        }
        const double nrm = norm2(v.row(i));
        for (int j = 0; j < d; ++j) v(i, j) /= nrm;
    }
    MarketModel m;
    m.cov = Matrix(d, d);
    for (int k = 0; k < d; ++k) {
        const double eig = d > 1 ? eig_lo + (eig_hi - eig_lo) * k / (d - 1.0) : eig_lo;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m.cov(i, j) += eig * v(k, i) * v(k, j);
    }
    // Symmetrize away round-off.
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double s = 0.5 * (m.cov(i, j) + m.cov(j, i));
            m.cov(i, j) = m.cov(j, i) = s;
        }
    m.mean.resize(d);
    for (double& x : m.mean) x = mean_scale * rng.uniform(0.5, 1.5);
    return m;
}

}  // namespace solpath
